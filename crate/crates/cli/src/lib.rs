//! The `chartforge` command line. `run` returns the process exit code:
//! 0 on success, 1 on a domain failure, 2 on a usage error.

pub mod render;

use chartforge::catalog::{self, FilterSet};
use chartforge::chart::{canonical_form, chart_type, check_assumptions, complexity, Chart};
use chartforge::features::{feature_report, gamma_components};
use chartforge::moves::{self, MoveSite, MoveTemplate};
use chartforge::regions::{complementary_disks, disk_report, find_lenses};
use chartforge::template::GraphTemplate;
use chartforge::verify::{self, Outcome};
use chartforge::{build_chart, Error};
use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use render::{render_svg, render_template, Layout, RenderSpec, Show};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "chartforge",
    version,
    about = "Charts of surface braids: validation, detectors, C-moves, enumeration and verification"
)]
struct Cli {
    /// Emit JSON reports.
    #[arg(long, global = true)]
    json: bool,
    /// RNG seed for randomized commands; CHARTFORGE_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a chart file against the chart axioms.
    Validate {
        file: PathBuf,
        /// Also check the standing assumptions on minimal charts.
        #[arg(long)]
        assumptions: bool,
    },
    /// Summary counts, complexity and type.
    Info { file: PathBuf },
    /// Strands, BW vertices and Γ_m components.
    Features { file: PathBuf },
    /// Complementary regions of each Γ_m component.
    Disks {
        file: PathBuf,
        #[arg(long)]
        m: u32,
    },
    /// Lenses of type (m, m+1).
    Lenses {
        file: PathBuf,
        /// Only this m; every label pair otherwise.
        #[arg(long)]
        m: Option<u32>,
    },
    /// List or apply C-moves.
    Moves {
        #[command(subcommand)]
        cmd: MovesCmd,
    },
    /// Look for a Γ_m template in a chart.
    Match {
        file: PathBuf,
        /// Catalog key such as fig13/g, or a template file.
        #[arg(long)]
        template: String,
        #[arg(long)]
        m: u32,
        /// Fail unless the outcome is as given.
        #[arg(long, value_parser = ["found", "absent"])]
        expect: Option<String>,
    },
    /// Enumerate Γ_m components with a fixed number of whites.
    Enumerate(EnumerateArgs),
    /// Run the exclusion case analysis over the nine graphs.
    Verify {
        #[arg(long)]
        rulebase: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        w_total: usize,
        #[arg(long)]
        expect_survivors: Option<usize>,
        /// Print the closing sum of every branch.
        #[arg(long)]
        proof: bool,
    },
    /// Draw a chart or a catalog template as SVG.
    Render(RenderArgs),
}

#[derive(Subcommand, Debug)]
enum MovesCmd {
    /// Templates, or the sites of each template in a chart.
    List {
        file: Option<PathBuf>,
        #[arg(long)]
        template: Option<String>,
    },
    /// Apply one move at a site printed by `moves list`.
    Apply {
        file: PathBuf,
        #[arg(long)]
        template: String,
        #[arg(long)]
        site: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply random moves, printing each step.
    Walk {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    w: usize,
    #[arg(long, conflicts_with = "filters")]
    preset: Option<String>,
    /// Comma-separated filter names.
    #[arg(long)]
    filters: Option<String>,
    #[arg(long)]
    emit_rejected: bool,
    #[arg(long)]
    expect_count: Option<usize>,
    /// Stop after this many raw configurations.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// Chart file; omit when drawing a template.
    file: Option<PathBuf>,
    /// Catalog key or template file to draw instead of a chart.
    #[arg(long, conflicts_with = "file")]
    template: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "tutte", value_parser = ["tutte", "force"])]
    layout: String,
    #[arg(long, default_value_t = 480)]
    width: u32,
    #[arg(long, default_value_t = 480)]
    height: u32,
    /// Comma list out of orientations, middles, face-ids, or none.
    #[arg(long, default_value = "orientations")]
    show: String,
    /// Label colors, e.g. --color 1=#ff0000 (repeatable).
    #[arg(long = "color")]
    colors: Vec<String>,
}

enum Fail {
    Usage(String),
    Domain(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Domain(e.to_string())
    }
}

type Res = std::result::Result<(), Fail>;

struct Ctx<'a> {
    json: bool,
    seed: u64,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, v: Value, text: &str) {
        if self.json {
            let mut v = v;
            if let Value::Object(m) = &mut v {
                m.insert("schema".into(), json!(SCHEMA));
            }
            let _ = writeln!(
                self.out,
                "{}",
                serde_json::to_string_pretty(&v).unwrap_or_default()
            );
        } else {
            let _ = write!(self.out, "{text}");
        }
    }
}

/// Run with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (mut o, mut e) = (std::io::stdout(), std::io::stderr());
    run_with(argv, &mut o, &mut e)
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let seed = match std::env::var("CHARTFORGE_SEED") {
        Ok(s) => match s.trim().parse() {
            Ok(v) => v,
            Err(_) => {
                let _ = writeln!(err, "error: CHARTFORGE_SEED is not an integer: {s}");
                return 2;
            }
        },
        Err(_) => cli.seed,
    };
    let mut ctx = Ctx {
        json: cli.json,
        seed,
        out,
        err,
    };
    match dispatch(cli.cmd, &mut ctx) {
        Ok(()) => 0,
        Err(Fail::Domain(m)) => {
            let _ = writeln!(ctx.err, "error: {m}");
            1
        }
        Err(Fail::Usage(m)) => {
            let _ = writeln!(ctx.err, "usage error: {m}");
            2
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Domain(format!("{}: {e}", path.display())))
}

fn load_chart(path: &Path) -> std::result::Result<Chart, Fail> {
    Ok(build_chart(&read(path)?)?)
}

fn load_template(key: &str) -> std::result::Result<GraphTemplate, Fail> {
    if catalog::builtin_keys().contains(&key) {
        return Ok(catalog::builtin(key)?);
    }
    let p = Path::new(key);
    if !p.exists() {
        return Err(Fail::Usage(format!(
            "{key} is neither a catalog key nor a file"
        )));
    }
    Ok(GraphTemplate::parse(&read(p)?)?)
}

fn load_move(name: &str) -> std::result::Result<MoveTemplate, Fail> {
    if let Some(t) = moves::builtin_template(name) {
        return Ok(t);
    }
    let p = Path::new(name);
    if !p.exists() {
        return Err(Fail::Usage(format!("unknown move template {name}")));
    }
    Ok(MoveTemplate::parse(&read(p)?)?)
}

fn write_or_print(ctx: &mut Ctx, path: &Option<PathBuf>, text: &str) -> Res {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Fail::Domain(format!("{}: {e}", p.display())))
        }
        None => {
            let _ = write!(ctx.out, "{text}");
            Ok(())
        }
    }
}

fn label_range(chart: &Chart) -> Vec<u32> {
    let mut ls: Vec<u32> = chart.edges.iter().map(|e| e.label).collect();
    ls.sort();
    ls.dedup();
    ls
}

fn dispatch(cmd: Cmd, ctx: &mut Ctx) -> Res {
    match cmd {
        Cmd::Validate { file, assumptions } => {
            let text = read(&file)?;
            let chart = match build_chart(&text) {
                Ok(c) => c,
                Err(e) => {
                    ctx.emit(
                        json!({"ok": false, "error": e.to_string()}),
                        &format!("invalid: {e}\n"),
                    );
                    return Err(Fail::Domain(format!("{} does not parse", file.display())));
                }
            };
            let mut rep = chart.validate();
            if assumptions && rep.ok {
                rep = check_assumptions(&chart);
            }
            let mut text = if rep.ok {
                "ok\n".to_string()
            } else {
                String::new()
            };
            for v in &rep.violations {
                text.push_str(&format!("{} at {}: {}\n", v.rule, v.location, v.message));
            }
            ctx.emit(json!({"ok": rep.ok, "violations": rep.violations}), &text);
            if rep.ok {
                Ok(())
            } else {
                Err(Fail::Domain(format!(
                    "{} violation(s)",
                    rep.violations.len()
                )))
            }
        }
        Cmd::Info { file } => {
            let chart = load_chart(&file)?;
            let (w, neg_free) = complexity(&chart);
            let ty = chart_type(&chart);
            let v = json!({
                "n": chart.n,
                "whites": chart.white_count(),
                "crossings": chart.crossing_count(),
                "blacks": chart.vertices.iter().filter(|v| v.kind == chartforge::VertexKind::Black).count(),
                "hoops": chart.hoop_count(),
                "edges": chart.edges.len(),
                "faces": chart.face_count(),
                "components": chart.components().len(),
                "complexity": [w, neg_free],
                "type": ty.as_ref().map(|(m, ns)| json!({"m": m, "counts": ns})),
                "canonical_form": canonical_form(&chart),
            });
            let ty_text = match &ty {
                Some((m, ns)) => format!(
                    "({m}; {})",
                    ns.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
                None => "none".into(),
            };
            let text = format!(
                "n = {}\nwhites = {}\ncrossings = {}\nhoops = {}\nedges = {}\nfaces = {}\ncomponents = {}\ncomplexity = ({w}, {neg_free})\ntype = {ty_text}\n",
                chart.n,
                v["whites"],
                v["crossings"],
                v["hoops"],
                v["edges"],
                v["faces"],
                v["components"]
            );
            ctx.emit(v, &text);
            Ok(())
        }
        Cmd::Features { file } => {
            let chart = load_chart(&file)?;
            let rep = feature_report(&chart);
            let mut text = String::new();
            for s in &rep.strands {
                text.push_str(&format!(
                    "label {} {:?} edges={} ends={} middle_at={}\n",
                    s.label,
                    s.class,
                    s.edges.join(","),
                    s.endpoints.join(","),
                    s.middle_at.join(",")
                ));
            }
            for (m, bw) in &rep.bw_vertices {
                if !bw.is_empty() {
                    text.push_str(&format!("BW vertices of Γ_{m}: {}\n", bw.join(",")));
                }
            }
            for (m, ws) in &rep.components {
                text.push_str(&format!("Γ_{m} components by whites: {ws:?}\n"));
            }
            ctx.emit(json!({"features": rep}), &text);
            Ok(())
        }
        Cmd::Disks { file, m } => {
            let chart = load_chart(&file)?;
            let mut reports = Vec::new();
            let mut text = String::new();
            for (ci, comp) in gamma_components(&chart, m)?.iter().enumerate() {
                for d in complementary_disks(&chart, comp)? {
                    let r = disk_report(&chart, &d);
                    text.push_str(&format!(
                        "component {ci} {}: {}-angled whites={} feelers={} special={} w_int={}{}\n",
                        r.id,
                        r.angled_k,
                        r.whites.join(","),
                        r.feelers,
                        r.special,
                        r.local_complexity.w_int,
                        if r.is_disk { "" } else { " (not a disk)" }
                    ));
                    reports.push(json!({"component": ci, "disk": r}));
                }
            }
            ctx.emit(json!({"m": m, "disks": reports}), &text);
            Ok(())
        }
        Cmd::Lenses { file, m } => {
            let chart = load_chart(&file)?;
            let ms = match m {
                Some(m) => vec![m],
                None => label_range(&chart)
                    .into_iter()
                    .filter(|&l| l + 1 < chart.n)
                    .collect(),
            };
            let mut found = Vec::new();
            let mut text = String::new();
            for m in ms {
                for l in find_lenses(&chart, m) {
                    let names = |s: &chartforge::features::Strand| {
                        s.edges
                            .iter()
                            .map(|&e| chart.edges[e].id.clone())
                            .collect::<Vec<_>>()
                    };
                    let (w1, w2) = (
                        chart.vertices[l.w1].id.clone(),
                        chart.vertices[l.w2].id.clone(),
                    );
                    text.push_str(&format!(
                        "lens ({m}, {}) {w1} {w2} e1={} e2={} {:?}\n",
                        m + 1,
                        names(&l.e1).join(","),
                        names(&l.e2).join(","),
                        l.kind
                    ));
                    found.push(json!({"m": m, "w1": w1, "w2": w2, "e1": names(&l.e1), "e2": names(&l.e2), "kind": l.kind}));
                }
            }
            if found.is_empty() {
                text.push_str("no lenses\n");
            }
            ctx.emit(json!({"lenses": found}), &text);
            Ok(())
        }
        Cmd::Moves { cmd } => moves_cmd(cmd, ctx),
        Cmd::Match {
            file,
            template,
            m,
            expect,
        } => {
            let chart = load_chart(&file)?;
            let t = load_template(&template)?;
            let hit = catalog::contains_template(&chart, m, &t);
            // Template dart id -> chart dart id.
            let pairs: Option<Vec<(String, String)>> = hit.as_ref().map(|map| {
                map.iter()
                    .enumerate()
                    .map(|(i, &d)| (t.darts[i].id.clone(), chart.darts[d].id.clone()))
                    .collect()
            });
            let text = match &pairs {
                Some(ps) => format!(
                    "found: {}\n",
                    ps.iter()
                        .map(|(a, b)| format!("{a}={b}"))
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
                None => "absent\n".into(),
            };
            ctx.emit(
                json!({"template": template, "m": m, "found": hit.is_some(), "darts": pairs}),
                &text,
            );
            match expect.as_deref() {
                Some("found") if hit.is_none() => Err(Fail::Domain("expected a match".into())),
                Some("absent") if hit.is_some() => Err(Fail::Domain("expected no match".into())),
                _ => Ok(()),
            }
        }
        Cmd::Enumerate(a) => enumerate_cmd(a, ctx),
        Cmd::Verify {
            rulebase,
            w_total,
            expect_survivors,
            proof,
        } => {
            let rules = match &rulebase {
                Some(p) => verify::parse_rulebase(&read(p)?)?,
                None => verify::builtin_rulebase(),
            };
            let rep = verify::pipeline_with(&rules, w_total)?;
            let checked = verify::check_report(&rep, &rules);
            let mut text = String::new();
            for c in &rep.candidates {
                text.push_str(&format!(
                    "{} {:?}{} rules={} branches={}\n",
                    c.candidate,
                    c.verdict,
                    c.lemma
                        .as_ref()
                        .map(|l| format!(" ({l})"))
                        .unwrap_or_default(),
                    c.rule_chain.join(","),
                    c.branches.len()
                ));
                if proof {
                    for b in &c.branches {
                        let line = match &b.outcome {
                            Outcome::Arithmetic { text, .. } | Outcome::Leaf { text, .. } => {
                                text.clone()
                            }
                            Outcome::Forced { rule, target } => {
                                format!("forced by {rule} to {target}")
                            }
                            Outcome::Open { sum, slack, .. } => {
                                format!("open: {sum} (slack {slack})")
                            }
                        };
                        text.push_str(&format!("  [{}] {line}\n", b.orientation));
                    }
                }
            }
            let survivors = rep.survivors().len();
            text.push_str(&format!("survivors: {}\n", rep.survivors().join(",")));
            if let Err(e) = &checked {
                text.push_str(&format!("re-check failed: {e}\n"));
            }
            ctx.emit(
                json!({"report": rep, "recheck": checked.clone().err()}),
                &text,
            );
            if let Err(e) = checked {
                return Err(Fail::Domain(format!("report re-check failed: {e}")));
            }
            match expect_survivors {
                Some(n) if n != survivors => Err(Fail::Domain(format!(
                    "expected {n} survivors, got {survivors}"
                ))),
                _ => Ok(()),
            }
        }
        Cmd::Render(a) => render_cmd(a, ctx),
    }
}

fn moves_cmd(cmd: MovesCmd, ctx: &mut Ctx) -> Res {
    match cmd {
        MovesCmd::List {
            file: None,
            template,
        } => {
            let ts: Vec<MoveTemplate> = match &template {
                Some(n) => vec![load_move(n)?],
                None => moves::builtin_templates(),
            };
            let mut text = String::new();
            let fmt = |d: Option<i64>| d.map(|x| format!("{x:+}")).unwrap_or_else(|| "*".into());
            for t in &ts {
                text.push_str(&format!(
                    "{} ({}) inverse={} w{} free{} hoops{} crossings{}\n",
                    t.name,
                    t.engine.keyword(),
                    t.inverse,
                    fmt(t.effect.w),
                    fmt(t.effect.free),
                    fmt(t.effect.hoops),
                    fmt(t.effect.crossings)
                ));
            }
            let v: Vec<Value> = ts
                .iter()
                .map(|t| json!({"name": t.name, "engine": t.engine, "inverse": t.inverse, "effect": t.effect, "side_conditions": t.side_conditions}))
                .collect();
            ctx.emit(json!({"templates": v}), &text);
            Ok(())
        }
        MovesCmd::List {
            file: Some(file),
            template,
        } => {
            let chart = load_chart(&file)?;
            let ts: Vec<MoveTemplate> = match &template {
                Some(n) => vec![load_move(n)?],
                None => moves::builtin_templates(),
            };
            let mut text = String::new();
            let mut v = Vec::new();
            for t in &ts {
                for s in moves::find_sites(&chart, t) {
                    text.push_str(&format!("{} {}\n", t.name, s.spec()));
                    v.push(json!({"template": t.name, "site": s.spec()}));
                }
            }
            ctx.emit(json!({"sites": v}), &text);
            Ok(())
        }
        MovesCmd::Apply {
            file,
            template,
            site,
            out,
        } => {
            let chart = load_chart(&file)?;
            let t = load_move(&template)?;
            let s = MoveSite::from_spec(&chart, &t, &site)?;
            let (next, inv) = moves::apply_with_inverse(&chart, &s)?;
            let body = next.to_text();
            if ctx.json {
                if let Some(p) = &out {
                    std::fs::write(p, &body)
                        .map_err(|e| Fail::Domain(format!("{}: {e}", p.display())))?;
                }
                ctx.emit(json!({"chart": body, "inverse": {"template": inv.template.name, "site": inv.spec()}}), "");
                Ok(())
            } else {
                let _ = writeln!(ctx.err, "inverse: {} {}", inv.template.name, inv.spec());
                write_or_print(ctx, &out, &body)
            }
        }
        MovesCmd::Walk { file, steps, out } => {
            let mut chart = load_chart(&file)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let mut log = Vec::new();
            let mut text = String::new();
            for _ in 0..steps {
                let sites = moves::all_sites(&chart);
                let Some(s) = sites.choose(&mut rng) else {
                    break;
                };
                chart = moves::apply(&chart, s)?;
                text.push_str(&format!("{} {}\n", s.template.name, s.spec()));
                log.push(json!({"template": s.template.name, "site": s.spec()}));
            }
            let body = chart.to_text();
            if let Some(p) = &out {
                std::fs::write(p, &body)
                    .map_err(|e| Fail::Domain(format!("{}: {e}", p.display())))?;
            } else if !ctx.json {
                text.push_str(&body);
            }
            ctx.emit(json!({"steps": log, "chart": body}), &text);
            Ok(())
        }
    }
}

fn enumerate_cmd(a: EnumerateArgs, ctx: &mut Ctx) -> Res {
    let filters = match (&a.preset, &a.filters) {
        (Some(p), _) => {
            FilterSet::preset(p).ok_or_else(|| Fail::Usage(format!("unknown preset {p}")))?
        }
        (None, Some(l)) => FilterSet::parse(l).map_err(|e| Fail::Usage(e.to_string()))?,
        (None, None) => FilterSet::structural(),
    };
    let res = catalog::enumerate_components(a.w, filters, a.budget)?;
    let mut text = String::new();
    let mut classes = Vec::new();
    for (c, &b) in res.classes.iter().zip(&res.blacks) {
        let key = c.representatives.first().and_then(verify::identify);
        text.push_str(&format!(
            "{} blacks={b} {}\n",
            key.as_deref().unwrap_or("-"),
            c.canonical_form
        ));
        classes.push(json!({"canonical_form": c.canonical_form, "blacks": b, "catalog": key, "variants": c.representatives.len()}));
    }
    text.push_str(&format!(
        "{} classes from {} raw configurations\n",
        res.classes.len(),
        res.raw
    ));
    let mut v = json!({"w": a.w, "filters": filters, "raw": res.raw, "raw_rejected": res.raw_rejected, "classes": classes});
    if a.emit_rejected {
        for r in &res.rejected {
            text.push_str(&format!(
                "rejected by {} blacks={} {}\n",
                r.filter, r.blacks, r.canonical_form
            ));
        }
        v["rejected"] = json!(res.rejected);
    }
    ctx.emit(v, &text);
    match a.expect_count {
        Some(n) if n != res.classes.len() => Err(Fail::Domain(format!(
            "expected {n} classes, got {}",
            res.classes.len()
        ))),
        _ => Ok(()),
    }
}

fn render_cmd(a: RenderArgs, ctx: &mut Ctx) -> Res {
    let mut spec = RenderSpec {
        seed: ctx.seed,
        width: a.width,
        height: a.height,
        ..RenderSpec::default()
    };
    spec.layout = if a.layout == "force" {
        Layout::Force
    } else {
        Layout::Tutte
    };
    spec.show = Show::default();
    for f in a.show.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match f {
            "orientations" => spec.show.orientations = true,
            "middles" => spec.show.middles = true,
            "face-ids" => spec.show.face_ids = true,
            "none" => {}
            other => return Err(Fail::Usage(format!("unknown --show flag {other}"))),
        }
    }
    for c in &a.colors {
        let (l, col) = c
            .split_once('=')
            .ok_or_else(|| Fail::Usage(format!("--color expects label=color, got {c}")))?;
        let l: u32 = l
            .parse()
            .map_err(|_| Fail::Usage(format!("bad label in --color {c}")))?;
        spec.label_colors.insert(l, col.to_string());
    }
    let rendered = match (&a.file, &a.template) {
        (Some(f), None) => render_svg(&load_chart(f)?, &spec),
        (None, Some(t)) => render_template(&load_template(t)?, &spec),
        _ => return Err(Fail::Usage("give a chart file or --template".into())),
    };
    if let Some(why) = &rendered.fallback {
        let _ = writeln!(ctx.err, "warning: {why}");
    }
    if ctx.json {
        if let Some(p) = &a.out {
            std::fs::write(p, &rendered.svg)
                .map_err(|e| Fail::Domain(format!("{}: {e}", p.display())))?;
        }
        ctx.emit(
            json!({"svg": rendered.svg, "fallback": rendered.fallback}),
            "",
        );
        Ok(())
    } else {
        write_or_print(ctx, &a.out, &rendered.svg)
    }
}
