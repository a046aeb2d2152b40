//! `twogroups` command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};
use twogroups_core::automorphisms::{
    aut_group_order, brute_force_aut, fusion_classes, is_at_group, is_fif_group, known_aut_generators,
};
use twogroups_core::catalog::{
    discover_entry, entry_gamma_l1, entry_path, entry_sl, entry_sp4, load_entry, natural_sl_module, save_entry,
    sp_generators, sporadic_target, verify_entry, CatalogEntry, DEFAULT_BUDGET, SPORADIC,
};
use twogroups_core::constructions::{
    build_a2, build_b2, build_generalized_quaternion, build_homocyclic, build_p_epsilon, A2Params, PepsParams,
};
use twogroups_core::gf2n::DEFAULT_POLYS;
use twogroups_core::repmod::{decompose_exterior_square, isomorphism, parse_module, write_module};
use twogroups_core::verify::{
    bundled_data_dir, run_all, write_reports, Config, Report, Scenario, Verdict, SCENARIO_NAMES,
};
use twogroups_core::{Error, FieldContext, FiniteGroup, GModule, IsoVerdict};

/// Overrides the catalog data directory.
pub const DATA_DIR_ENV: &str = "TWOGROUPS_DATA_DIR";

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "twogroups", version, about = "Suzuki 2-groups, their automorphisms and the module checks behind them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Finite field tables.
    Field {
        #[command(subcommand)]
        command: FieldCommand,
    },
    /// Build a group and print its order statistics.
    Construct {
        /// a2:<n>:<k>, b2:<n>, peps[:<e>], homocyclic:<rank>:<exp>, quaternion:<order>
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// Fusion classes under the known automorphisms.
    Fusion { spec: String },
    /// Order of the generated automorphism group.
    Aut {
        spec: String,
        /// Also enumerate all automorphisms by backtracking (small groups only).
        #[arg(long)]
        brute_force: bool,
    },
    /// Module constructions and tests.
    Module {
        #[command(subcommand)]
        op: ModuleOp,
    },
    /// Transitive linear group catalog.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Run verification scenarios.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum FieldCommand {
    Info {
        #[arg(long)]
        n: Option<u32>,
        /// Defining polynomial as hex, e.g. 0x5b.
        #[arg(long)]
        poly: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ModuleOp {
    /// Natural module of SL_m(2^f) or Sp_{2m}(2^f).
    Natural {
        /// sl or sp
        group: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        f: u32,
    },
    Dual { file: PathBuf },
    Exterior { file: PathBuf },
    Restrict { file: PathBuf },
    Orbits { file: PathBuf },
    Irreducible { file: PathBuf },
    Lattice { file: PathBuf },
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Summands of the exterior square of the natural SL_m(2^f) module.
    Decompose {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        f: u32,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    List,
    /// Verify a data-file entry (A6, A7, …) or a built-in one (gamma-l1:<n>, sl:<m>:<f>, sp4:<f>).
    Verify { name: String },
    /// Regenerate a data-file entry by seeded random search.
    Discover {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// `all` or a scenario name.
    target: String,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for JSON reports, the TSV summary and the results cache.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    f: Option<u32>,
    #[arg(long)]
    entry: Option<String>,
    #[arg(long)]
    slow: bool,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_cache: bool,
}

/// Failure carrying its exit code: 1 for a failed check, 2 for bad input.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotFound(_) | Error::Unknown | Error::NotAHomomorphism(_) | Error::NotBijective => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Field { command: FieldCommand::Info { n, poly } } => field_info(n, poly, out),
        Command::Construct { spec, json } => construct(&spec, json, out),
        Command::Fusion { spec } => fusion(&spec, out),
        Command::Aut { spec, brute_force } => aut(&spec, brute_force, out),
        Command::Module { op } => module(op, out),
        Command::Catalog { command } => catalog(command, out),
        Command::Verify(args) => verify(args, out),
    }
}

fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from).unwrap_or_else(bundled_data_dir)
}

fn parse_hex(s: &str) -> Result<u32, Failure> {
    u32::from_str_radix(s.trim_start_matches("0x").trim_start_matches("0X"), 16)
        .map_err(|_| Failure::usage(format!("not a hex number: {s:?}")))
}

fn field_info(n: Option<u32>, poly: Option<String>, out: &mut dyn Write) -> Outcome {
    let poly = poly.as_deref().map(parse_hex).transpose()?;
    let degrees: Vec<u32> = match n {
        Some(n) => vec![n],
        None if poly.is_some() => return Err(Failure::usage("--poly needs --n")),
        None => (1..=DEFAULT_POLYS.len() as u32).collect(),
    };
    writeln!(out, "n\tpoly\torder\tprimitive")?;
    for n in degrees {
        let field = FieldContext::new(n, poly)?;
        writeln!(out, "{n}\t{:#x}\t{}\t{}", field.poly(), field.order(), field.is_primitive())?;
    }
    Ok(0)
}

fn number<T: std::str::FromStr>(part: Option<&str>, what: &str, spec: &str) -> Result<T, Failure> {
    let part = part.ok_or_else(|| Failure::usage(format!("{spec:?}: missing {what}")))?;
    part.parse().map_err(|_| Failure::usage(format!("{spec:?}: bad {what} {part:?}")))
}

fn parse_group(spec: &str) -> Result<FiniteGroup, Failure> {
    let mut parts = spec.split(':');
    let family = parts.next().unwrap_or("").to_ascii_lowercase();
    let group = match family.as_str() {
        "a2" => {
            let n = number(parts.next(), "n", spec)?;
            let k = number(parts.next(), "k", spec)?;
            build_a2(A2Params::new(n, k))?
        }
        "b2" => build_b2(number(parts.next(), "n", spec)?, None)?,
        "peps" => {
            let params = PepsParams::standard();
            match parts.next() {
                None => build_p_epsilon(params)?,
                Some(e) => {
                    let e: u64 = number(Some(e), "exponent", spec)?;
                    let eps = params.field.pow(params.eps, e);
                    build_p_epsilon(PepsParams::new(params.field, eps)?)?
                }
            }
        }
        "homocyclic" => build_homocyclic(number(parts.next(), "rank", spec)?, number(parts.next(), "exponent", spec)?)?,
        "quaternion" | "q" => build_generalized_quaternion(number(parts.next(), "order", spec)?)?,
        _ => return Err(Failure::usage(format!("unknown group family in {spec:?}"))),
    };
    if parts.next().is_some() {
        return Err(Failure::usage(format!("{spec:?}: too many fields")));
    }
    Ok(group)
}

fn braces<K: std::fmt::Display, V: std::fmt::Display>(items: impl IntoIterator<Item = (K, V)>) -> String {
    let parts: Vec<String> = items.into_iter().map(|(k, v)| format!("{k}:{v}")).collect();
    format!("{{{}}}", parts.join(","))
}

fn list(items: &[usize]) -> String {
    let parts: Vec<String> = items.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn construct(spec: &str, json: bool, out: &mut dyn Write) -> Outcome {
    let g = parse_group(spec)?;
    let dump = g.dump();
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&dump).expect("dump serializes"))?;
    } else {
        writeln!(out, "name {}", dump.name)?;
        writeln!(out, "order {}", dump.order)?;
        writeln!(out, "center {}", dump.center_size)?;
        writeln!(out, "profile {}", braces(dump.order_profile))?;
    }
    Ok(0)
}

fn fusion(spec: &str, out: &mut dyn Write) -> Outcome {
    let g = parse_group(spec)?;
    let auts = known_aut_generators(&g)?;
    let part = fusion_classes(&g, &auts);
    writeln!(out, "classes {}", part.classes.len())?;
    writeln!(out, "sizes {}", list(&part.sorted_sizes()))?;
    for c in &part.classes {
        writeln!(out, "class order={} size={}", g.element_order(c[0]), c.len())?;
    }
    Ok(0)
}

fn aut(spec: &str, brute: bool, out: &mut dyn Write) -> Outcome {
    let g = parse_group(spec)?;
    let known = match known_aut_generators(&g) {
        Ok(a) => Some(a),
        Err(Error::Unsupported(_)) if brute => None,
        Err(e) => return Err(e.into()),
    };
    let mut code = 0;
    let mut generated = None;
    if let Some(auts) = &known {
        let order = aut_group_order(&g, auts);
        generated = Some(order);
        writeln!(out, "generated-order {order}")?;
        writeln!(out, "at {}", is_at_group(&g, auts))?;
        writeln!(out, "fif {}", is_fif_group(&g, auts))?;
    }
    if brute {
        let auts = brute_force_aut(&g)?;
        let order = aut_group_order(&g, &auts);
        writeln!(out, "brute-force-order {order}")?;
        if known.is_none() {
            writeln!(out, "at {}", is_at_group(&g, &auts))?;
            writeln!(out, "fif {}", is_fif_group(&g, &auts))?;
        }
        if let Some(gen) = generated {
            writeln!(out, "agree {}", gen == order)?;
            if gen != order {
                code = 1;
            }
        }
    }
    Ok(code)
}

fn read_module(path: &Path) -> Result<GModule, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
    };
    Ok(parse_module(&text)?)
}

fn module(op: ModuleOp, out: &mut dyn Write) -> Outcome {
    match op {
        ModuleOp::Natural { group, m, f } => {
            let field = FieldContext::new(f, None)?;
            let module = match group.as_str() {
                "sl" => natural_sl_module(m, field)?,
                "sp" => GModule::new(field, sp_generators(2 * m, field))?,
                _ => return Err(Failure::usage(format!("natural module for {group:?}: expected sl or sp"))),
            };
            write!(out, "{}", write_module(&module))?;
        }
        ModuleOp::Dual { file } => write!(out, "{}", write_module(&read_module(&file)?.dual()))?,
        ModuleOp::Exterior { file } => write!(out, "{}", write_module(&read_module(&file)?.exterior_square()))?,
        ModuleOp::Restrict { file } => write!(out, "{}", write_module(&read_module(&file)?.restrict_scalars()))?,
        ModuleOp::Orbits { file } => {
            let sizes = read_module(&file)?.orbit_sizes()?;
            writeln!(out, "orbits {}", list(&sizes))?;
            writeln!(out, "transitive {}", sizes.len() <= 1)?;
        }
        ModuleOp::Irreducible { file } => writeln!(out, "irreducible {}", read_module(&file)?.is_irreducible()?)?,
        ModuleOp::Lattice { file } => {
            let m = read_module(&file)?;
            let lattice = m.submodule_lattice()?;
            let mut by_dim = std::collections::BTreeMap::new();
            for s in lattice.members() {
                *by_dim.entry(s.dim()).or_insert(0usize) += 1;
            }
            writeln!(out, "submodules {}", lattice.len())?;
            writeln!(out, "by-dimension {}", braces(by_dim))?;
        }
        ModuleOp::Iso { a, b, seed } => {
            let (verdict, _) = isomorphism(&read_module(&a)?, &read_module(&b)?, seed)?;
            writeln!(out, "{}", serde_json::to_string(&verdict).expect("verdict serializes").trim_matches('"'))?;
            if verdict == IsoVerdict::Unknown {
                return Ok(3);
            }
        }
        ModuleOp::Decompose { m, f } => {
            let field = FieldContext::new(f, None)?;
            let report = decompose_exterior_square(&natural_sl_module(m, field)?)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
            return Ok(match report.verdict() {
                IsoVerdict::Isomorphic => 0,
                IsoVerdict::NotIsomorphic => 1,
                IsoVerdict::Unknown => 3,
            });
        }
    }
    Ok(0)
}

fn builtin_entry(name: &str) -> Option<Result<CatalogEntry, Failure>> {
    let mut parts = name.split(':');
    let kind = parts.next()?;
    let entry = match kind {
        "gamma-l1" => number(parts.next(), "n", name).and_then(|n| Ok(entry_gamma_l1(n)?)),
        "sl" => number(parts.next(), "m", name)
            .and_then(|m| Ok((m, number(parts.next(), "f", name)?)))
            .and_then(|(m, f)| Ok(entry_sl(m, f)?)),
        "sp4" => number(parts.next(), "f", name).and_then(|f| Ok(entry_sp4(f)?)),
        _ => return None,
    };
    Some(entry)
}

fn catalog(command: CatalogCommand, out: &mut dyn Write) -> Outcome {
    match command {
        CatalogCommand::List => {
            let dir = data_dir();
            writeln!(out, "name\tn\torder\tseed\tfile")?;
            for t in &SPORADIC {
                let path = entry_path(&dir, t);
                let state = if path.exists() { path.display().to_string() } else { "missing".into() };
                writeln!(out, "{}\t{}\t{}\t{}\t{state}", t.name, t.n, t.order, t.seed)?;
            }
            Ok(0)
        }
        CatalogCommand::Verify { name } => {
            let entry = match builtin_entry(&name) {
                Some(e) => e?,
                None => {
                    let target = sporadic_target(&name).map_err(|e| Failure::usage(e.to_string()))?;
                    let path = entry_path(&data_dir(), &target);
                    load_entry(&path).map_err(|e| {
                        Failure::usage(format!(
                            "{}: {e}; regenerate with `twogroups catalog discover {}`",
                            path.display(),
                            target.name
                        ))
                    })?
                }
            };
            let report = verify_entry(&entry)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?;
            Ok(if report.verified { 0 } else { 1 })
        }
        CatalogCommand::Discover { name, seed, budget } => {
            let target = sporadic_target(&name).map_err(|e| Failure::usage(e.to_string()))?;
            let seed = seed.unwrap_or(target.seed);
            let entry = discover_entry(&target, seed, budget)?;
            let report = verify_entry(&entry)?;
            if !report.verified {
                return Err(Failure { code: 1, message: format!("discovered entry failed verification: {report:?}") });
            }
            let path = entry_path(&data_dir(), &target);
            save_entry(&entry, &path)?;
            writeln!(out, "{} order {} seed {seed} -> {}", target.name, report.order, path.display())?;
            Ok(0)
        }
    }
}

fn build_config(args: &VerifyArgs) -> Result<Config, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    if cfg.options.data_dir == bundled_data_dir() {
        cfg.options.data_dir = data_dir();
    }
    if args.target != "all" {
        let name = args.target.as_str();
        if !SCENARIO_NAMES.contains(&name) {
            return Err(Failure::usage(format!("unknown scenario {name:?}; expected all or one of {}", SCENARIO_NAMES.join(", "))));
        }
        let param = args.n.map(|n| n.to_string()).or(args.f.map(|f| f.to_string())).or(args.entry.clone());
        cfg.scenarios = match param {
            Some(p) => vec![Scenario::parse(&format!("{name}:{p}"))?],
            None => Scenario::defaults().into_iter().filter(|s| s.name() == name).collect(),
        };
    }
    if args.slow {
        cfg.options.slow = true;
    }
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }
    if let Some(s) = args.seed {
        cfg.options.seed = s;
    }
    if let Some(dir) = &args.out {
        cfg.results_dir = Some(dir.clone());
    }
    Ok(cfg)
}

fn cache_key(scenario: &Scenario, cfg: &Config) -> String {
    let key = format!(
        "{scenario}|seed={}|slow={}|data={}|version={VERSION}",
        cfg.options.seed,
        cfg.options.slow,
        cfg.options.data_dir.display()
    );
    Sha256::digest(key.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let cfg = build_config(&args)?;
    let cache_dir = cfg.results_dir.as_ref().filter(|_| !args.no_cache && !cfg.options.timing).map(|d| d.join(".cache"));
    let mut reports: Vec<Option<(Report, bool)>> = vec![None; cfg.scenarios.len()];
    let mut pending = Vec::new();
    for (i, s) in cfg.scenarios.iter().enumerate() {
        let hit = cache_dir.as_ref().and_then(|d| std::fs::read_to_string(d.join(cache_key(s, &cfg) + ".json")).ok());
        match hit.and_then(|text| serde_json::from_str::<Report>(&text).ok()) {
            Some(r) => reports[i] = Some((r, true)),
            None => pending.push(i),
        }
    }
    let batch = Config {
        scenarios: pending.iter().map(|&i| cfg.scenarios[i].clone()).collect(),
        results_dir: None,
        ..cfg.clone()
    };
    for (&i, r) in pending.iter().zip(run_all(&batch)?) {
        if let (Some(dir), Verdict::Pass) = (&cache_dir, r.verdict) {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(cache_key(&cfg.scenarios[i], &cfg) + ".json"), r.to_json())?;
        }
        reports[i] = Some((r, false));
    }
    let reports: Vec<(Report, bool)> = reports.into_iter().map(|r| r.expect("every scenario ran")).collect();
    let plain: Vec<Report> = reports.iter().map(|(r, _)| r.clone()).collect();
    if let Some(dir) = &cfg.results_dir {
        write_reports(dir, &plain)?;
    }
    for (r, cached) in &reports {
        writeln!(out, "{}\t{}{}", r.id(), r.verdict, if *cached { "\tcached" } else { "" })?;
    }
    let worst = twogroups_core::verify::worst_verdict(&plain);
    writeln!(out, "overall\t{worst}")?;
    Ok(match worst {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Unknown => 3,
    })
}
