mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use num_rational::BigRational;
use sadic_core::io::{
    format_rational, language_to_json, parse_rational, sequence_from_json, tower_from_json,
    tower_to_json, weight_table_to_json,
};
use sadic_core::language::required_input_len;
use sadic_core::{
    characteristic_measure, complexity, cone_at_level, critical_level_estimate,
    critical_level_example_report, diagonal_report, entropy_upper_bound, evaluate_tower,
    generate_language, levelwise_measures, orbit_collision_on_periodic, recognizability_scan,
    scan_source_len, shift_period_check, transfer_measure, transfer_property_report,
    validate_tower, DiagonalFamilySpec, DirectiveSequence, VectorTower,
};
use serde_json::{json, Value};

use report::{csv_field, Format, Report};

const MAX_DEPTH_ENV: &str = "SADIC_MAX_DEPTH";

#[derive(Parser)]
#[command(
    name = "sadic",
    version,
    about = "Exact finite-depth analysis of S-adic subshifts"
)]
struct Cli {
    /// JSON sequence descriptor.
    #[arg(long, global = true)]
    sequence: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admitted words of the level-n language, with the complexity p(n).
    Language {
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long)]
        len: usize,
        /// Generation depth.
        #[arg(long)]
        depth: usize,
    },
    /// Upper bound min ln|A_n| / β_-(n) on the entropy, with growth diagnostics.
    EntropyBound {
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        positivity_bound: usize,
    },
    /// Transfer of the characteristic measure of a word through σ_level.
    Transfer {
        /// Word over the source alphabet of σ_level.
        #[arg(long)]
        word: String,
        #[arg(long)]
        target_len: usize,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Evaluate a vector tower on a cylinder at every level.
    TowerEval {
        /// Tower depth when built from --top.
        #[arg(long)]
        depth: Option<usize>,
        /// Top vector, comma separated rationals.
        #[arg(long, value_delimiter = ',', conflicts_with = "tower")]
        top: Option<Vec<String>>,
        /// JSON tower file (array of rational vectors).
        #[arg(long)]
        tower: Option<PathBuf>,
        #[arg(long)]
        word: String,
        /// Also build the level-wise weight tables up to this length.
        #[arg(long)]
        measure_len: Option<usize>,
    },
    /// Finite-depth frequency cones spanned by M(σ_[level, probe)).
    Cones {
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        probe: Vec<usize>,
    },
    /// Rank profile of the cones and the apparent critical level.
    CriticalLevel {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        probe: usize,
    },
    /// Bounded-window recognizability scan of σ_level.
    Recognizability {
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        aperiodic_only: bool,
        /// Generation depth for the source language (default level + 11, capped).
        #[arg(long)]
        depth: Option<usize>,
        /// Two source words whose periodic points are compared, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        periodic: Option<Vec<String>>,
    },
    /// Built-in constructions.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Two-letter example with critical level 1.
    #[command(name = "example-6-3")]
    CriticalLevelExample,
    /// The alternating diagonal family and its d towers.
    Diagonal {
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        ell: Vec<u64>,
        /// Number of blocks (default: one per ell entry).
        #[arg(long)]
        depth: Option<usize>,
        /// Largest cylinder length searched for the base-level rank.
        #[arg(long, default_value_t = 64)]
        base_len: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 for user errors, 2 for violated mathematical preconditions, 3 when the
/// requested depth or length cannot be materialized.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<sadic_core::Error>() {
            return match err {
                sadic_core::Error::Parse(_) => 1,
                err if err.is_exhaustion() => 3,
                _ => 2,
            };
        }
    }
    1
}

fn depth_cap() -> Result<Option<usize>> {
    match std::env::var(MAX_DEPTH_ENV) {
        Ok(v) => {
            Ok(Some(v.trim().parse().with_context(|| {
                format!("{MAX_DEPTH_ENV}={v} is not a depth")
            })?))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context(MAX_DEPTH_ENV),
    }
}

fn load_sequence(path: Option<&Path>, cap: Option<usize>) -> Result<DirectiveSequence> {
    let Some(path) = path else {
        bail!("this command needs --sequence <FILE>")
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(sequence_from_json(&text, cap).with_context(|| format!("in {}", path.display()))?)
}

fn run(cli: &Cli) -> Result<()> {
    let cap = depth_cap()?;
    let seq = || load_sequence(cli.sequence.as_deref(), cap);
    let report = match &cli.command {
        Command::Language { level, len, depth } => language(&seq()?, *level, *len, *depth)?,
        Command::EntropyBound {
            depth,
            positivity_bound,
        } => entropy(&seq()?, *depth, *positivity_bound)?,
        Command::Transfer {
            word,
            target_len,
            level,
        } => transfer(&seq()?, word, *target_len, *level)?,
        Command::TowerEval {
            depth,
            top,
            tower,
            word,
            measure_len,
        } => tower_eval(
            &seq()?,
            *depth,
            top.as_deref(),
            tower.as_deref(),
            word,
            *measure_len,
        )?,
        Command::Cones { level, probe } => cones(&seq()?, *level, probe)?,
        Command::CriticalLevel { depth, probe } => {
            let r = critical_level_estimate(&seq()?, *depth, *probe)?;
            let mut csv = String::from("level,rank\n");
            for (n, rank) in r.ranks.iter().enumerate() {
                csv.push_str(&format!("{n},{rank}\n"));
            }
            Report::new(serde_json::to_value(&r)?).with_csv(csv)
        }
        Command::Recognizability {
            level,
            radius,
            aperiodic_only,
            depth,
            periodic,
        } => recognizability(
            &seq()?,
            *level,
            *radius,
            *aperiodic_only,
            *depth,
            periodic.as_deref(),
        )?,
        Command::Demo {
            which: Demo::CriticalLevelExample,
        } => Report::new(serde_json::to_value(critical_level_example_report()?)?),
        Command::Demo {
            which:
                Demo::Diagonal {
                    d,
                    ell,
                    depth,
                    base_len,
                },
        } => {
            let blocks = depth.unwrap_or(ell.len());
            let spec = DiagonalFamilySpec {
                ell: ell.clone(),
                blocks,
            };
            spec.validate()?;
            if let Some(c) = cap.filter(|&c| c < spec.depth()) {
                return Err(sadic_core::Error::DepthExhausted(format!(
                    "diagonal depth {} exceeds {MAX_DEPTH_ENV}={c}",
                    spec.depth()
                ))
                .into());
            }
            Report::new(serde_json::to_value(diagonal_report(
                &spec, *d, *base_len,
            )?)?)
        }
    };
    report.emit(cli.format, cli.out.as_deref())
}

fn language(seq: &DirectiveSequence, level: usize, len: usize, depth: usize) -> Result<Report> {
    let table = generate_language(seq, level, len, depth)?;
    let counts = (1..=len)
        .map(|n| complexity(&table, n))
        .collect::<sadic_core::Result<Vec<_>>>()?;
    let mut json = language_to_json(&table);
    json["complexity"] = serde_json::to_value(&counts)?;
    let names = |n: usize| -> Vec<String> {
        table
            .words_of_len(n)
            .iter()
            .map(|w| table.alphabet().format_word(w))
            .collect()
    };
    let mut csv = String::from("length,p,words\n");
    let mut text = format!(
        "# level {level}, lengths 1..={len}, depth {}, stabilized {}\nn\tp(n)\twords\n",
        table.depth(),
        table.stabilized()
    );
    for c in &counts {
        let words = names(c.length).join(" ");
        csv.push_str(&format!("{},{},{}\n", c.length, c.count, csv_field(&words)));
        text.push_str(&format!("{}\t{}\t{}\n", c.length, c.count, words));
    }
    Ok(Report::new(json).with_csv(csv).with_text(text))
}

fn entropy(seq: &DirectiveSequence, depth: usize, positivity_bound: usize) -> Result<Report> {
    let bound = entropy_upper_bound(seq, depth)?;
    let growth = seq.growth_report(depth, positivity_bound)?;
    let mut csv = String::from("n,alphabet_size,beta_minus,ratio\n");
    for n in 1..=depth {
        let card = seq.alphabet(n)?.len();
        let beta = growth.beta_minus[n - 1];
        csv.push_str(&format!(
            "{n},{card},{beta},{:e}\n",
            (card as f64).ln() / beta as f64
        ));
    }
    Ok(Report::new(json!({ "bound": bound, "growth": growth })).with_csv(csv))
}

fn transfer(
    seq: &DirectiveSequence,
    word: &str,
    target_len: usize,
    level: usize,
) -> Result<Report> {
    let sigma = seq.level(level)?;
    let w = sigma.source().parse_word(word)?;
    if w.is_empty() {
        return Err(sadic_core::Error::EmptyPattern.into());
    }
    let source_len = required_input_len(target_len, &sigma).max(target_len);
    let mu = characteristic_measure(sigma.source().clone(), &w, source_len)?;
    let out = transfer_measure(&sigma, &mu, target_len)?;
    let properties = transfer_property_report(&sigma, &mu, target_len, Some(&w))?;
    let image = sigma.target().format_word(&sigma.apply(&w)?);
    let json = json!({
        "level": level,
        "word": sigma.source().format_word(&w),
        "image": image,
        "source_len": source_len,
        "target_len": target_len,
        "table": weight_table_to_json(&out),
        "properties": properties,
    });
    let mut text = format!(
        "# transfer of mu_{} through level {level} (image {image}), cylinders up to length {target_len}\n",
        sigma.source().format_word(&w)
    );
    for line in out.to_csv().lines().skip(1) {
        let (u, x) = line.split_once(',').unwrap_or((line, ""));
        text.push_str(&format!("{u}\t{x}\n"));
    }
    text.push_str(&format!(
        "# mass {}, properties hold: {}\n",
        format_rational(out.mass()),
        properties.all_ok()
    ));
    Ok(Report::new(json).with_csv(out.to_csv()).with_text(text))
}

fn tower_eval(
    seq: &DirectiveSequence,
    depth: Option<usize>,
    top: Option<&[String]>,
    tower_file: Option<&Path>,
    word: &str,
    measure_len: Option<usize>,
) -> Result<Report> {
    let tower = match (top, tower_file) {
        (Some(top), None) => {
            let Some(depth) = depth else {
                bail!("--top needs --depth")
            };
            let top = top
                .iter()
                .map(|s| parse_rational(s))
                .collect::<sadic_core::Result<Vec<BigRational>>>()?;
            VectorTower::from_top(seq, depth, top)?
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let tower = tower_from_json(&text).with_context(|| format!("in {}", path.display()))?;
            if depth.is_some_and(|d| d != tower.depth()) {
                bail!(
                    "--depth {} disagrees with the tower file depth {}",
                    depth.unwrap(),
                    tower.depth()
                );
            }
            tower
        }
        _ => bail!("give exactly one of --top or --tower"),
    };
    let w = seq.alphabet(0)?.parse_word(word)?;
    let validation = validate_tower(seq, &tower)?;
    let evaluations = (0..=tower.depth())
        .map(|n| evaluate_tower(seq, &tower, &w, n))
        .collect::<sadic_core::Result<Vec<_>>>()?;
    let mut json = json!({
        "depth": tower.depth(),
        "word": seq.alphabet(0)?.format_word(&w),
        "tower": tower_to_json(&tower),
        "validation": validation,
        "evaluations": evaluations,
    });
    if let Some(len) = measure_len {
        let mt = levelwise_measures(seq, &tower, len)?;
        let base = mt.table(0)?;
        json["measure"] = json!({
            "L": len,
            "junction_mass": format_rational(mt.junction_mass()),
            "error_bound": format_rational(&mt.error_bound(w.len())),
            "round_trip_exact": mt.round_trip_exact(),
            "word_weight": if w.len() <= len { Value::String(format_rational(&base.get(&w))) } else { Value::Null },
            "level_0_table": weight_table_to_json(&base.truncated(len)),
        });
    }
    let mut csv = String::from("level,value,error_bound\n");
    for e in &evaluations {
        csv.push_str(&format!(
            "{},{},{}\n",
            e.level,
            format_rational(&e.value),
            format_rational(&e.error_bound)
        ));
    }
    Ok(Report::new(json).with_csv(csv))
}

fn cones(seq: &DirectiveSequence, level: usize, probes: &[usize]) -> Result<Report> {
    let mut probes = probes.to_vec();
    probes.sort_unstable();
    probes.dedup();
    let reports = probes
        .iter()
        .map(|&m| cone_at_level(seq, level, m))
        .collect::<sadic_core::Result<Vec<_>>>()?;
    let mut csv = String::from("level,probe,rank,angular_width,nested_in_previous,generators\n");
    for r in &reports {
        let gens: Vec<String> = r
            .generators
            .iter()
            .map(|g| g.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        let nested = r
            .nested_in_previous
            .map_or(String::new(), |b| b.to_string());
        csv.push_str(&format!(
            "{},{},{},{:e},{nested},{}\n",
            r.level,
            r.probe,
            r.rank,
            r.angular_width,
            gens.join(";")
        ));
    }
    Ok(Report::new(json!({ "level": level, "cones": reports })).with_csv(csv))
}

fn recognizability(
    seq: &DirectiveSequence,
    level: usize,
    radius: usize,
    aperiodic_only: bool,
    depth: Option<usize>,
    periodic: Option<&[String]>,
) -> Result<Report> {
    let sigma = seq.level(level)?;
    let source_len = scan_source_len(&sigma, radius);
    let depth = depth.unwrap_or((level + 11).min(seq.depth()));
    let table = generate_language(seq, level + 1, source_len, depth)?;
    let verdict = recognizability_scan(&sigma, &table, radius, aperiodic_only)?;
    let mut json = json!({
        "level": level,
        "radius": radius,
        "aperiodic_only": aperiodic_only,
        "source_len": source_len,
        "table_depth": table.depth(),
        "table_stabilized": table.stabilized(),
        "result": verdict,
    });
    let mut text = format!(
        "# level {level}, source words of length {source_len} generated to depth {} (stabilized {})\n{}",
        table.depth(),
        table.stabilized(),
        verdict.to_text()
    );
    if let Some(words) = periodic {
        let [w1, w2] = words else {
            bail!("--periodic takes exactly two words")
        };
        let (w1, w2) = (
            sigma.source().parse_word(w1)?,
            sigma.source().parse_word(w2)?,
        );
        let first = shift_period_check(&sigma, &w1)?;
        let second = shift_period_check(&sigma, &w2)?;
        let collision = orbit_collision_on_periodic(&sigma, &w1, &w2)?;
        text.push_str(&format!(
            "periodic {} -> {} (period preserved {}), {} -> {} (period preserved {}), orbit collision {}\n",
            first.word, first.image, first.preserved, second.word, second.image, second.preserved, collision.collision
        ));
        json["periodic"] = json!({ "shift_period": [first, second], "orbit": collision });
    }
    Ok(Report::new(json).with_text(text))
}
