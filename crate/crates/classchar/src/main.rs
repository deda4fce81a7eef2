use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use classchar::chars::{dixon_table_cached, CharTable};
use classchar::element::{dim_centralizer_end, jordan_type, matrix_order, support};
use classchar::field::{FieldSpec, Fq};
use classchar::forms::GroupSpec;
use classchar::grp::{EnumerateOptions, EnumeratedGroup, SampleMode, DEFAULT_CAP};
use classchar::matspace::MatrixFq;
use classchar::products::{class_square, power_word_check, thompson_search};
use classchar::report::{BoundReport, Verdict};
use classchar::roster::{parse_groups_file, roster_specs, run_roster, RosterOptions, OBSERVATIONAL_CLAIMS};
use classchar::verify::{run_claim, ClaimOptions, McOptions, CLAIM_IDS};
use classchar::walks::{exact_walk, mc_walk, mckay_graph, mckay_walk, TvConvention};

#[derive(Parser)]
#[command(name = "classchar", version, about = "Conjugacy classes, character tables and character-ratio checks for small classical groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Clone)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every Monte Carlo computation; required by those subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Convention::L1)]
    tv_convention: Convention,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Copy, Clone, ValueEnum)]
enum Convention {
    L1,
    Half,
}

impl From<Convention> for TvConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::L1 => TvConvention::L1,
            Convention::Half => TvConvention::Half,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Uniform,
    ProductReplacement,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a group and compare with the order formula.
    Group {
        #[arg(long)]
        group: String,
    },
    /// Conjugacy classes with sizes, supports and Jordan types.
    Classes {
        #[arg(long)]
        group: String,
    },
    /// The character table.
    Chartable {
        #[arg(long)]
        group: String,
    },
    /// Support, order and Jordan type of a class representative or a matrix.
    Element {
        #[arg(long)]
        group: String,
        #[arg(long, conflicts_with = "matrix")]
        class: Option<usize>,
        /// Rows separated by `;`, entries by `,` or spaces: integers `0..q` or `z^k`.
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Run one claim verifier.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(CLAIM_IDS))]
        claim: String,
        #[arg(long)]
        group: String,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Random walk driven by a conjugacy class.
    Walk {
        #[arg(long)]
        group: String,
        #[arg(long)]
        class: usize,
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 12)]
        steps: usize,
    },
    /// McKay graph of a character and the walk on it.
    Mckay {
        #[arg(long)]
        group: String,
        #[arg(long = "char")]
        character: usize,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Which classes lie in the square of a class.
    Cover {
        #[arg(long)]
        group: String,
        #[arg(long)]
        class: usize,
    },
    /// Search for a class whose square is the whole group.
    Thompson {
        #[arg(long)]
        group: String,
    },
    /// Image of the word x^N y^N.
    Powerword {
        #[arg(long)]
        group: String,
        #[arg(long = "N")]
        n: u64,
    },
    /// Run every exact check over the roster.
    Roster {
        /// One group spec per line instead of the built-in roster.
        #[arg(long)]
        groups_file: Option<PathBuf>,
        /// Directory for bundle.json and per-report CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        walk_steps: usize,
    },
}

struct Output {
    json: String,
    csv: String,
    table: String,
    /// Exact failure: nonzero exit.
    failed: bool,
}

impl Output {
    fn new<T: Serialize>(value: &T, csv: String, table: String, failed: bool) -> anyhow::Result<Output> {
        Ok(Output { json: serde_json::to_string_pretty(value)?, csv, table, failed })
    }

    fn from_report(r: &BoundReport, exact: bool) -> anyhow::Result<Output> {
        Output::new(r, r.to_csv(), report_table(r), exact && !r.passed())
    }
}

fn report_table(r: &BoundReport) -> String {
    let verdict = |v: Verdict| serde_json::to_value(v).unwrap().as_str().unwrap_or("").to_string();
    let mut out = format!("{} {}  verdict: {}\n", r.claim, r.group.as_deref().unwrap_or(""), verdict(r.verdict));
    let width = r.rows.iter().map(|row| row.label.chars().count()).max().unwrap_or(0);
    for row in &r.rows {
        out.push_str(&format!(
            "  {:<width$}  {:>14.6}  {:>14.6}  {:<14}{}\n",
            row.label,
            row.measured,
            row.bound,
            verdict(row.verdict),
            row.note.as_deref().unwrap_or("")
        ));
    }
    for n in &r.notes {
        out.push_str(&format!("  note: {n}\n"));
    }
    out
}

struct Ctx {
    global: Global,
}

impl Ctx {
    fn spec(&self, s: &str) -> anyhow::Result<GroupSpec> {
        GroupSpec::parse(s).with_context(|| format!("bad group spec {s:?}"))
    }

    fn group(&self, s: &str) -> anyhow::Result<EnumeratedGroup> {
        let spec = self.spec(s)?;
        let opts = EnumerateOptions { cap: DEFAULT_CAP, cache_dir: self.global.cache_dir.clone() };
        Ok(EnumeratedGroup::enumerate_with(&spec, &opts)?)
    }

    fn table(&self, g: &EnumeratedGroup) -> anyhow::Result<CharTable> {
        Ok(dixon_table_cached(g, self.global.cache_dir.as_deref())?)
    }

    fn seed(&self, what: &str) -> anyhow::Result<u64> {
        self.global.seed.ok_or_else(|| anyhow!("{what} is a Monte Carlo computation: pass --seed"))
    }
}

fn parse_entry(tok: &str, f: &FieldSpec) -> anyhow::Result<Fq> {
    if let Some(k) = tok.strip_prefix("z^") {
        return Ok(f.exp(k.parse().with_context(|| format!("bad exponent in {tok:?}"))?));
    }
    if tok == "z" {
        return Ok(f.exp(1));
    }
    let v: u32 = tok.parse().with_context(|| format!("bad field element {tok:?}"))?;
    if v >= f.q() {
        bail!("field element {v} out of range for GF({})", f.q());
    }
    Ok(Fq(v as u16))
}

fn parse_matrix(s: &str, n: usize, f: &FieldSpec) -> anyhow::Result<MatrixFq> {
    let rows: Vec<Vec<Fq>> = s
        .split(';')
        .map(|row| row.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(|t| parse_entry(t, f)).collect())
        .collect::<anyhow::Result<_>>()?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        bail!("expected a {n}x{n} matrix");
    }
    Ok(MatrixFq::from_rows(&rows))
}

#[derive(Serialize)]
struct GroupSummary {
    group: String,
    order: u64,
    formula_order: String,
    matches_formula: bool,
    classes: usize,
    generators: usize,
    exponent: u64,
    center: usize,
}

#[derive(Serialize)]
struct ElementSummary {
    group: String,
    class: Option<usize>,
    member: bool,
    order: u64,
    support: usize,
    char_poly: String,
    eigen_blocks: Vec<(String, usize, usize)>,
    unipotent_jordan: Vec<usize>,
    dim_centralizer_end: usize,
}

fn key_value_csv(v: &serde_json::Value) -> String {
    let mut out = String::from("key,value\n");
    if let Some(map) = v.as_object() {
        for (k, x) in map {
            out.push_str(&format!("{k},{x}\n"));
        }
    }
    out
}

fn key_value_table(v: &serde_json::Value) -> String {
    let mut out = String::new();
    if let Some(map) = v.as_object() {
        let w = map.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, x) in map {
            out.push_str(&format!("{k:<w$}  {x}\n"));
        }
    }
    out
}

fn run(cmd: Command, ctx: &Ctx) -> anyhow::Result<Output> {
    match cmd {
        Command::Group { group } => {
            let g = ctx.group(&group)?;
            let formula = g.spec.order();
            let s = GroupSummary {
                group: g.spec.to_string(),
                order: g.order(),
                matches_formula: formula == g.order().into(),
                formula_order: formula.to_string(),
                classes: g.num_classes(),
                generators: g.generator_ids().len(),
                exponent: g.exponent(),
                center: g.central_classes().len(),
            };
            let v = serde_json::to_value(&s)?;
            Output::new(&s, key_value_csv(&v), key_value_table(&v), !s.matches_formula)
        }
        Command::Classes { group } => {
            let g = ctx.group(&group)?;
            let csv = classchar::element::class_report_csv(&g);
            let table = csv.replace(',', "\t");
            Output::new(&g.classes(), csv, table, false)
        }
        Command::Chartable { group } => {
            let g = ctx.group(&group)?;
            let t = ctx.table(&g)?;
            let mut csv = String::from("character");
            for j in 0..t.num_classes() {
                csv.push_str(&format!(",class{j}"));
            }
            csv.push('\n');
            for i in 0..t.num_chars() {
                csv.push_str(&format!("X.{i}"));
                for j in 0..t.num_classes() {
                    csv.push_str(&format!(",\"{}\"", t.value(i, j).reduce_level().render()));
                }
                csv.push('\n');
            }
            Output::new(&t.to_record(), csv, t.render(), t.check_orthogonality().is_err())
        }
        Command::Element { group, class, matrix } => {
            let spec = ctx.spec(&group)?;
            let f = spec.field().clone();
            let (m, class) = match (class, matrix) {
                (Some(c), None) => {
                    let g = ctx.group(&group)?;
                    if c >= g.num_classes() {
                        bail!("class {c} out of range: {} has {} classes", g.spec, g.num_classes());
                    }
                    (g.element(g.class(c).representative).clone(), Some(c))
                }
                (None, Some(s)) => (parse_matrix(&s, spec.n, &f)?, None),
                _ => bail!("pass exactly one of --class or --matrix"),
            };
            let sp = support(&m, &f);
            let jt = jordan_type(&m, &f);
            let s = ElementSummary {
                group: spec.to_string(),
                class,
                member: spec.contains(&m)?,
                order: matrix_order(&m, &f),
                support: sp.supp,
                char_poly: m.char_poly(&f).to_string_with(&f),
                eigen_blocks: sp.eigen_blocks.iter().map(|b| (b.factor.to_string_with(&f), b.algebraic, b.geometric)).collect(),
                unipotent_jordan: jt.unipotent.parts(),
                dim_centralizer_end: dim_centralizer_end(&m, &f),
            };
            let v = serde_json::to_value(&s)?;
            Output::new(&s, key_value_csv(&v), key_value_table(&v), false)
        }
        Command::Verify { claim, group, mode } => {
            let spec = ctx.spec(&group)?;
            let observational = OBSERVATIONAL_CLAIMS.contains(&claim.as_str());
            let seed = if observational { ctx.seed(&claim)? } else { ctx.global.seed.unwrap_or(0) };
            let opts = ClaimOptions {
                seed,
                trials: ctx.global.trials,
                cache_dir: ctx.global.cache_dir.clone(),
                mode: mode.map(|m| match m {
                    Mode::Uniform => SampleMode::UniformExact,
                    Mode::ProductReplacement => SampleMode::ProductReplacement,
                }),
                ..Default::default()
            };
            let r = run_claim(&claim, &spec, &opts)?;
            Output::from_report(&r, !observational)
        }
        Command::Walk { group, class, exact: _, mc, steps } => {
            let convention: TvConvention = ctx.global.tv_convention.into();
            if mc {
                let seed = ctx.seed("walk --mc")?;
                let spec = ctx.spec(&group)?;
                let g = match ctx.group(&group) {
                    Ok(g) => Some(g),
                    Err(e) if e.downcast_ref::<classchar::Error>().is_some_and(|e| matches!(e, classchar::Error::CapExceeded { .. })) => None,
                    Err(e) => return Err(e),
                };
                let Some(g) = g else { bail!("walk --mc needs a class id of an enumerable group") };
                if class >= g.num_classes() {
                    bail!("class {class} out of range");
                }
                let x = g.element(g.class(class).representative).clone();
                let opts = McOptions { trials: ctx.global.trials, seed, mode: SampleMode::UniformExact, ..Default::default() };
                let r = mc_walk(&spec, Some(&g), &x, steps as u32, &opts)?;
                let br = r.to_bound_report();
                Output::new(&r, r.to_csv(), report_table(&br), false)
            } else {
                let g = ctx.group(&group)?;
                if class >= g.num_classes() {
                    bail!("class {class} out of range");
                }
                let t = ctx.table(&g)?;
                let mut w = exact_walk(&g, &t, class, steps);
                w.convention = convention;
                let br = w.to_bound_report();
                Output::new(&w, w.to_csv(), report_table(&br), !br.passed())
            }
        }
        Command::Mckay { group, character, start, steps } => {
            let g = ctx.group(&group)?;
            let t = ctx.table(&g)?;
            let graph = mckay_graph(&t, character)?;
            let walk = mckay_walk(&t, character, start, steps)?;
            let mut r = graph.to_bound_report(&t);
            let wr = walk.to_bound_report();
            r.rows.extend(wr.rows.iter().cloned());
            r.verdict = r.verdict.combine(wr.verdict);
            r.data = serde_json::json!({ "graph": graph, "walk": walk });
            Output::new(&r, walk.to_csv(), report_table(&r), !r.passed())
        }
        Command::Cover { group, class } => {
            let g = ctx.group(&group)?;
            let t = ctx.table(&g)?;
            let c = class_square(&g, &t, class)?;
            Output::from_report(&c.to_bound_report(), true)
        }
        Command::Thompson { group } => {
            let g = ctx.group(&group)?;
            let t = ctx.table(&g)?;
            let th = thompson_search(&g, &t)?;
            Output::from_report(&th.to_bound_report(), true)
        }
        Command::Powerword { group, n } => {
            if n == 0 {
                bail!("--N must be positive");
            }
            let g = ctx.group(&group)?;
            Output::from_report(&power_word_check(&g, n), true)
        }
        Command::Roster { groups_file, out, walk_steps } => {
            let groups = match groups_file {
                Some(p) => parse_groups_file(&p)?,
                None => roster_specs(),
            };
            let opts = RosterOptions {
                groups,
                seed: ctx.global.seed,
                trials: ctx.global.trials,
                cache_dir: ctx.global.cache_dir.clone(),
                convention: ctx.global.tv_convention.into(),
                walk_steps,
                ..Default::default()
            };
            let bundle = run_roster(&opts);
            if let Some(dir) = out {
                bundle.write(&dir)?;
            }
            let failures: Vec<String> = bundle.exact_failures().map(|r| format!("{} {}", r.claim, r.group.as_deref().unwrap_or(""))).collect();
            let mut csv = String::from("claim,group,verdict\n");
            let mut table = String::new();
            for r in &bundle.reports {
                let v = serde_json::to_value(r.verdict)?;
                let v = v.as_str().unwrap_or("");
                csv.push_str(&format!("{},{},{v}\n", r.claim, r.group.as_deref().unwrap_or("")));
                table.push_str(&format!("{:<14} {:<10} {v}\n", r.claim, r.group.as_deref().unwrap_or("")));
            }
            table.push_str(&format!("{} reports, {} exact failures\n", bundle.reports.len(), failures.len()));
            Output::new(&bundle, csv, table, !failures.is_empty())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Ctx { global: cli.global.clone() };
    match run(cli.command, &ctx) {
        Ok(out) => {
            let text = match ctx.global.format {
                Format::Json => out.json + "\n",
                Format::Csv => out.csv,
                Format::Table => out.table,
            };
            print!("{text}");
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
