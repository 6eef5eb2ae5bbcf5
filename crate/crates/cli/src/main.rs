use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use relalg_cli::RunReport;
use relalg_core::axioms::{check_ra_axioms_with, derived_laws_with, DEFAULT_SAMPLES, DEFAULT_SEED};
use relalg_core::constructions::{
    bruck_ryser_excluded, fused_subalgebra, is_sum_of_two_squares, lyndon, mackenzie,
    non_representable_indices, slope_representation, GammaSet, PrimeField,
};
use relalg_core::eqlogic::{holds, parse_equation, Verdict, DEFAULT_CAP};
use relalg_core::format::{parse_ra, write_ra};
use relalg_core::ideal::{extend_to_maximal, ideal_generate, quotient};
use relalg_core::points::{check_points_lemma, represent_quotient, SbAlgebra};
use relalg_core::proper::{abstract_structure, decompose, full_re, full_sb};
use relalg_core::relation::{parse_class_list, ConcreteRelation};
use relalg_core::search::{
    find_square_representation, parse_rep, representation_to_proper, verify_representation,
    write_rep, NodeOrdering, SearchConfig, SearchOutcome,
};
use relalg_core::{find_isomorphism, AtomStructure, CheckOptions, Error, FiniteRelationAlgebra};

#[derive(Parser)]
#[command(
    name = "relalg",
    version,
    about = "Workbench for finite relation algebras"
)]
struct Cli {
    /// Print the run report as one JSON object on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for searches and exhaustive checks.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Include per-phase wall-clock times in the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the relation algebra axioms and derived laws.
    Check {
        file: PathBuf,
        /// Random triples per law when exhaustive checking is too large.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Write a named algebra in `.ra` format.
    Gen {
        #[command(subcommand)]
        what: GenTarget,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Search for a square representation.
    Represent {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_base: usize,
        /// Seconds allowed per base size.
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
        #[arg(long, value_enum, default_value_t = Ordering::Lexicographic)]
        ordering: Ordering,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a `.rep` certificate against an algebra.
    Verify { algebra: PathBuf, rep: PathBuf },
    /// Decide an equation (or every line of an `.eqs` file) in an algebra.
    Eval {
        equation: String,
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Check the product decomposition of `Sb(E)`.
    Decompose {
        #[arg(long)]
        classes: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Check the points lemma for `E`.
    Points {
        #[arg(long)]
        classes: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Quotient by the ideal generated by an element.
    Quotient {
        file: PathBuf,
        #[arg(long)]
        ideal_seed: String,
        /// Extend the ideal to a maximal one first.
        #[arg(long)]
        maximal: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Represent `Sb(E)/J` over the points of `E`, for a maximal `J`.
    Pipeline {
        #[arg(long)]
        classes: String,
        /// Index of the class that survives; defaults to the largest.
        #[arg(long)]
        keep: Option<usize>,
        /// Where to write the representation.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the quotient algebra.
        #[arg(long)]
        algebra_out: Option<PathBuf>,
    },
    /// Whether the Bruck–Ryser criterion excludes a projective plane order.
    BruckRyser { order: u64 },
    /// Excluded plane orders and the matching Lyndon indices up to a limit.
    Orders {
        #[arg(long, default_value_t = 30)]
        limit: u64,
    },
    /// The slope representation of `lyndon(q+1, {1,3})` on `GF(q)²`.
    SlopeRep {
        q: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the fused subalgebra of `lyndon(k, {1,3})` for `n` atoms.
    Fuse { n: usize, k: usize },
}

#[derive(Subcommand)]
enum GenTarget {
    Mackenzie,
    Lyndon {
        n: usize,
        #[arg(long, default_value = "1,3")]
        gamma: GammaSet,
    },
    Sb {
        #[arg(long)]
        classes: String,
    },
    Re {
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Ordering {
    Lexicographic,
    FewestCandidates,
}

/// Failures that end the run with exit code 2.
#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{path}: {msg}")]
    File { path: String, msg: String },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

fn file_err(path: &Path, msg: impl ToString) -> Failure {
    Failure::File {
        path: path.display().to_string(),
        msg: msg.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| file_err(path, e))
}

fn load_structure(path: &Path) -> Result<AtomStructure, Failure> {
    parse_ra(&read(path)?).map_err(|e| file_err(path, e))
}

fn load_algebra(path: &Path) -> Result<FiniteRelationAlgebra, Failure> {
    FiniteRelationAlgebra::new(load_structure(path)?).map_err(|e| file_err(path, e))
}

fn unit_of(classes: &str) -> Result<ConcreteRelation, Failure> {
    let sizes = parse_class_list(classes)?;
    Ok(ConcreteRelation::from_classes(&sizes)?)
}

struct Run {
    report: RunReport,
    cli_seed: u64,
    jobs: usize,
}

impl Run {
    fn note(&self, line: impl AsRef<str>) {
        eprintln!("{}", line.as_ref());
    }

    fn verdict(&mut self, name: &str, passed: bool, witness: Option<serde_json::Value>) {
        let mark = if passed { "PASS" } else { "FAIL" };
        match &witness {
            Some(w) if !passed => eprintln!("{mark} {name}: {w}"),
            _ => eprintln!("{mark} {name}"),
        }
        self.report.verdict(name, passed, witness);
    }

    fn timed<T>(&mut self, phase: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        self.report
            .record_time(phase, start.elapsed().as_millis() as u64);
        out
    }

    /// Writes `text` to `path`, or to stdout when no path is given and
    /// stdout is not reserved for JSON.
    fn emit(&mut self, path: Option<&Path>, text: &str, json: bool) -> Result<(), Failure> {
        match path {
            Some(p) => {
                fs::write(p, text).map_err(|e| file_err(p, e))?;
                self.report.outputs.push(p.display().to_string());
                self.note(format!("wrote {}", p.display()));
            }
            None if !json => print!("{text}"),
            None => {}
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut run = Run {
        report: RunReport::new(argv[1..].to_vec(), cli.seed, cli.timings),
        cli_seed: cli.seed,
        jobs: cli.jobs.max(1),
    };
    let json = cli.json;
    let outcome = dispatch(&mut run, cli.command, json);
    let code = match outcome {
        Ok(()) if run.report.passed => 0,
        Ok(()) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            run.report.error = Some(e.to_string());
            run.report.passed = false;
            2
        }
    };
    if json {
        println!("{}", run.report.to_json());
    }
    ExitCode::from(code)
}

fn dispatch(run: &mut Run, command: Command, json: bool) -> Result<(), Failure> {
    match command {
        Command::Check { file, samples } => check(run, &file, samples),
        Command::Gen { what, output } => gen(run, what, output.as_deref(), json),
        Command::Represent {
            file,
            max_base,
            budget,
            ordering,
            output,
        } => represent(run, &file, max_base, budget, ordering, output.as_deref()),
        Command::Verify { algebra, rep } => verify(run, &algebra, &rep),
        Command::Eval {
            equation,
            file,
            cap,
        } => eval(run, &equation, &file, cap),
        Command::Decompose { classes, samples } => {
            let unit = unit_of(&classes)?;
            let d = decompose(&unit)?;
            let r = run.timed("decompose", |run| d.verify(samples, run.cli_seed))?;
            run.note(format!(
                "classes {:?}: {} carrier atoms, {} random elements",
                r.class_sizes, r.carrier_atoms_checked, r.random_elements_checked
            ));
            run.verdict(
                "mutually inverse homomorphisms",
                r.passed,
                r.failure.as_ref().map(|f| json!(f)),
            );
            run.report.detail("decomposition", &r);
            Ok(())
        }
        Command::Points { classes, trials } => {
            let unit = unit_of(&classes)?;
            let r = run.timed("points", |run| {
                check_points_lemma(&unit, trials, run.cli_seed)
            })?;
            run.note(format!("|Pt_E| = {}", r.point_count));
            run.verdict("points are valid", r.points_valid, None);
            for c in &r.checks {
                let w = c.witness.as_ref().map(|w| json!(w));
                run.verdict(&format!("property {}", c.id), c.passed, w);
            }
            run.report.detail("points", &r);
            Ok(())
        }
        Command::Quotient {
            file,
            ideal_seed,
            maximal,
            output,
        } => quotient_cmd(run, &file, &ideal_seed, maximal, output.as_deref(), json),
        Command::Pipeline {
            classes,
            keep,
            output,
            algebra_out,
        } => pipeline(
            run,
            &classes,
            keep,
            output.as_deref(),
            algebra_out.as_deref(),
            json,
        ),
        Command::BruckRyser { order } => {
            let excluded = bruck_ryser_excluded(order);
            run.note(format!(
                "order {order}: {}",
                if excluded {
                    "no projective plane (excluded)"
                } else {
                    "not excluded by the criterion"
                }
            ));
            run.verdict("computed", true, None);
            run.report.detail("order", order);
            run.report.detail("excluded", excluded);
            run.report.detail("residue_mod_4", order % 4);
            run.report
                .detail("sum_of_two_squares", is_sum_of_two_squares(order));
            Ok(())
        }
        Command::Orders { limit } => {
            let excluded: Vec<u64> = (2..=limit).filter(|&n| bruck_ryser_excluded(n)).collect();
            let indices = non_representable_indices(limit);
            run.note(format!("excluded orders in [2,{limit}]: {excluded:?}"));
            run.note(format!(
                "non-representable indices up to {limit}: {indices:?}"
            ));
            run.verdict("computed", true, None);
            run.report.detail("excluded_orders", excluded);
            run.report.detail("non_representable_indices", indices);
            Ok(())
        }
        Command::SlopeRep { q, output } => {
            let field = PrimeField::new(q)?;
            let rep = run.timed("construct", |_| slope_representation(field))?;
            let n = q as usize + 1;
            let a = FiniteRelationAlgebra::new(lyndon(n, GammaSet::projective_line())?.structure)?;
            let v = run.timed("verify", |_| verify_representation(&a, &rep));
            run.note(format!(
                "base {} = q² points, {} atoms",
                rep.base_size(),
                a.atom_count()
            ));
            run.verdict(
                &format!("represents lyndon({n}, {{1,3}})"),
                v.passed,
                v.failure.as_ref().map(|f| json!(f)),
            );
            run.report.detail("base", rep.base_size());
            let text = write_rep(&a, &rep, &format!("lyndon-{n}.ra"));
            run.emit(output.as_deref(), &text, json)
        }
        Command::Fuse { n, k } => {
            let f = run.timed("fuse", |_| fused_subalgebra(n, k))?;
            let r = &f.report;
            run.note(format!("b (image) = {}", r.image_b));
            run.note(format!("b (short) = {}", r.short_b));
            run.verdict("b;b = 1", r.image_b_squared_is_one, None);
            run.verdict("b;b_j = 0'.-b_j", r.image_b_products, None);
            run.verdict("image is a subalgebra", r.image_is_subalgebra, None);
            run.verdict("homomorphism", r.preserves_operations, None);
            run.verdict("injective", r.injective, None);
            if !r.passed {
                run.verdict("fusion", false, r.failure.as_ref().map(|f| json!(f)));
            }
            run.report.detail("fusion", r);
            run.report.detail("blocks", f.image_blocks.len());
            Ok(())
        }
    }
}

fn check(run: &mut Run, file: &Path, samples: usize) -> Result<(), Failure> {
    let s = load_structure(file)?;
    let violation = s.violation();
    run.verdict(
        "atom structure",
        violation.is_none(),
        violation.as_ref().map(|v| json!(v.to_string())),
    );
    let a = FiniteRelationAlgebra::unchecked(s);
    let opts = CheckOptions {
        seed: run.cli_seed,
        samples,
    };
    let axioms = run.timed("axioms", |_| check_ra_axioms_with(&a, opts));
    let derived = run.timed("derived", |_| derived_laws_with(&a, opts));
    for c in axioms.checks.iter().chain(&derived.checks) {
        run.verdict(
            &format!("{} {}", c.id, c.law),
            c.passed,
            c.witness.as_ref().map(|w| json!(w)),
        );
    }
    run.report.detail("atoms", a.atom_count());
    run.report.detail("integral", a.is_integral());
    run.report.detail("symmetric", a.is_symmetric());
    run.report.detail("simple", a.is_simple());
    run.report.detail("axioms", &axioms);
    run.report.detail("derived_laws", &derived);
    Ok(())
}

fn gen(run: &mut Run, what: GenTarget, output: Option<&Path>, json: bool) -> Result<(), Failure> {
    let (name, s) = match what {
        GenTarget::Mackenzie => ("mackenzie".to_string(), mackenzie()),
        GenTarget::Lyndon { n, gamma } => {
            let l = lyndon(n, gamma)?;
            for w in &l.warnings {
                run.note(format!("warning: {w}"));
            }
            run.report.detail("warnings", &l.warnings);
            (format!("lyndon({n}, {gamma})"), l.structure)
        }
        GenTarget::Sb { classes } => {
            let unit = unit_of(&classes)?;
            (
                format!("Sb({classes})"),
                abstract_structure(&full_sb(&unit)?)?,
            )
        }
        GenTarget::Re { n } => (format!("Re({n})"), abstract_structure(&full_re(n)?)?),
    };
    let violation = s.violation();
    run.note(format!("{name}: {} atoms", s.atom_count()));
    run.verdict(
        "atom structure",
        violation.is_none(),
        violation.as_ref().map(|v| json!(v.to_string())),
    );
    run.report.detail("algebra", &name);
    run.report.detail("atoms", s.atom_count());
    let text = format!("# {name}\n{}", write_ra(&s));
    run.emit(output, &text, json)
}

fn represent(
    run: &mut Run,
    file: &Path,
    max_base: usize,
    budget: f64,
    ordering: Ordering,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let a = load_algebra(file)?;
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Failure::Usage(
            "--budget must be a positive number of seconds".into(),
        ));
    }
    let cfg = SearchConfig {
        max_base,
        ordering: match ordering {
            Ordering::Lexicographic => NodeOrdering::Lexicographic,
            Ordering::FewestCandidates => NodeOrdering::FewestCandidates,
        },
        budget: Duration::from_secs_f64(budget),
        deterministic: true,
        jobs: run.jobs,
    };
    if !a.is_simple() {
        run.verdict(
            "simple",
            false,
            Some(json!("1;x;1 = 1 fails for some x ≠ 0")),
        );
        return Ok(());
    }
    let outcome = run.timed("search", |_| find_square_representation(&a, &cfg))?;
    let sizes: Vec<_> = outcome
        .sizes()
        .iter()
        .map(|s| json!({"base": s.base, "exhausted": s.exhausted, "nodes": s.nodes}))
        .collect();
    for s in outcome.sizes() {
        run.note(format!(
            "base {}: {} nodes, {}",
            s.base,
            s.nodes,
            if s.exhausted {
                "exhausted"
            } else {
                "not exhausted"
            }
        ));
    }
    run.report.detail("sizes", &sizes);
    match outcome {
        SearchOutcome::Found { rep, .. } => {
            run.note(format!(
                "found a representation on {} points",
                rep.base_size()
            ));
            run.verdict("representation found", true, None);
            run.report.detail("outcome", "Found");
            run.report.detail("base", rep.base_size());
            let text = write_rep(&a, &rep, &file.display().to_string());
            match output {
                Some(_) => run.emit(output, &text, true)?,
                None => run.report.detail("rep", &text),
            }
        }
        SearchOutcome::NotFoundWithinBounds { .. } => {
            run.note(format!("NotFoundWithinBounds (max base {max_base})"));
            run.report.detail("outcome", "NotFoundWithinBounds");
            run.verdict(
                "representation found",
                false,
                Some(json!({ "sizes": sizes })),
            );
        }
    }
    Ok(())
}

fn verify(run: &mut Run, algebra: &Path, rep: &Path) -> Result<(), Failure> {
    let a = load_algebra(algebra)?;
    let raw = parse_rep(&read(rep)?).map_err(|e| file_err(rep, e))?;
    let map = raw.resolve(&a).map_err(|e| file_err(rep, e))?;
    let v = run.timed("verify", |_| verify_representation(&a, &map));
    run.report.detail("base", v.base);
    run.verdict(
        "representation",
        v.passed,
        v.failure
            .as_ref()
            .map(|f| serde_json::to_value(f).expect("plain data")),
    );
    Ok(())
}

fn eval(run: &mut Run, equation: &str, file: &Path, cap: u128) -> Result<(), Failure> {
    let a = load_algebra(file)?;
    let eqs_path = Path::new(equation);
    let lines: Vec<String> = if equation.ends_with(".eqs") && eqs_path.is_file() {
        read(eqs_path)?
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
            .filter(|l| !l.is_empty())
            .collect()
    } else {
        vec![equation.to_string()]
    };
    let pool = rayon_pool(run.jobs)?;
    for line in &lines {
        let eq = parse_equation(line).map_err(|e| Failure::Usage(format!("`{line}`: {e}")))?;
        let verdict = run.timed(line, |_| pool.install(|| holds(&eq, &a, cap)))?;
        match verdict {
            Verdict::Valid => run.verdict(&eq.to_string(), true, None),
            Verdict::Counterexample(c) => {
                let w: serde_json::Map<String, serde_json::Value> = c
                    .render(&a)
                    .into_iter()
                    .map(|(k, v)| (k, json!(v)))
                    .collect();
                run.verdict(&eq.to_string(), false, Some(serde_json::Value::Object(w)));
            }
        }
    }
    Ok(())
}

fn rayon_pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn quotient_cmd(
    run: &mut Run,
    file: &Path,
    seed: &str,
    maximal: bool,
    output: Option<&Path>,
    json: bool,
) -> Result<(), Failure> {
    let a = load_algebra(file)?;
    let x = a.parse_element(seed)?;
    let mut ideal = ideal_generate(&a, &[x])?;
    if maximal {
        ideal = match extend_to_maximal(&a, &ideal) {
            Ok(i) => i,
            Err(Error::ImproperIdeal) => ideal,
            Err(e) => return Err(e.into()),
        };
    }
    let top = a.render(ideal.top());
    run.note(format!("ideal ↓({top})"));
    run.report.detail("ideal_top", &top);
    if !ideal.is_proper(&a) {
        run.verdict(
            "proper ideal",
            false,
            Some(json!({ "seed": seed, "top": top })),
        );
        return Ok(());
    }
    run.verdict("proper ideal", true, None);
    let q = quotient(&a, &ideal)?;
    let surviving: Vec<&str> = q
        .map
        .surviving_atoms()
        .into_iter()
        .map(|i| a.structure().name(i))
        .collect();
    run.note(format!(
        "quotient: {} atoms ({}), {}",
        q.algebra.atom_count(),
        surviving.join(" "),
        if q.algebra.is_simple() {
            "simple"
        } else {
            "not simple"
        }
    ));
    run.report.detail("surviving_atoms", &surviving);
    run.report.detail("simple", q.algebra.is_simple());
    let text = write_ra(q.algebra.structure());
    run.emit(output, &text, json)
}

fn pipeline(
    run: &mut Run,
    classes: &str,
    keep: Option<usize>,
    output: Option<&Path>,
    algebra_out: Option<&Path>,
    json: bool,
) -> Result<(), Failure> {
    let unit = unit_of(classes)?;
    let sb = run.timed("build", |_| SbAlgebra::new(&unit))?;
    let sizes: Vec<usize> = sb.points().classes().iter().map(Vec::len).collect();
    let keep = keep.unwrap_or_else(|| {
        let max = sizes.iter().copied().max().unwrap_or(0);
        sizes.iter().position(|&s| s == max).unwrap_or(0)
    });
    let j = sb.maximal_ideal_keeping(keep)?;
    let seed = run.cli_seed;
    let out = run.timed("pipeline", |_| represent_quotient(&sb, &j, seed))?;
    run.note(format!(
        "|Pt_E| = {}, kernel ↓({}), base {}",
        sb.points().len(),
        out.near_hom.kernel_top,
        out.rep.base_size()
    ));
    for c in &out.near_hom.checks {
        let w = c.witness.as_ref().map(|w| json!(w));
        run.verdict(&format!("sigma property {}", c.id), c.passed, w);
    }
    run.verdict(
        "square representation of the quotient",
        out.verification.passed,
        out.verification
            .failure
            .as_ref()
            .map(|f| serde_json::to_value(f).expect("plain data")),
    );
    let p = representation_to_proper(&out.quotient.algebra, &out.rep)?;
    let expected = abstract_structure(&full_re(sizes[keep])?)?;
    let iso = find_isomorphism(&abstract_structure(&p)?, &expected).is_some();
    run.verdict(&format!("isomorphic to Re({})", sizes[keep]), iso, None);
    run.report.detail("points", sb.points().len());
    run.report.detail("base", out.rep.base_size());
    run.report.detail("near_homomorphism", &out.near_hom);
    if let Some(path) = algebra_out {
        run.emit(
            Some(path),
            &write_ra(out.quotient.algebra.structure()),
            json,
        )?;
    }
    let hint = algebra_out.map_or("quotient".to_string(), |p| p.display().to_string());
    let text = write_rep(&out.quotient.algebra, &out.rep, &hint);
    match output {
        Some(_) => run.emit(output, &text, json),
        None => {
            run.report.detail("rep", &text);
            Ok(())
        }
    }
}
