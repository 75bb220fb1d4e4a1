//! Command-line interface: compute degrees for one character set, enumerate
//! classes, survey cells, reproduce the survey table, print Hilbert series,
//! evaluate closed-form bounds, and run the proposition checker.
//!
//! Exit codes: 0 success, 1 bad input, 2 internal violation (a failed
//! consistency check or a nonempty checker report).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::json;

use betafield::bounds::{
    self, hard_floor, int_root_lower_bound, qbr_bound, sqrt_lower_bound, two_char_profile,
    BoundKind,
};
use betafield::degrees::{degree_invariants_capped, DegreeOutcome, DegreeTraceRow};
use betafield::groups::{enumerate_classes, parse_character_set};
use betafield::hilbert::{hilbert_numerator, verify_hilbert_properties};
use betafield::survey::{
    check_propositions, class_label, load_cache, survey_cell_with_cache, write_csv, write_jsonl,
    CellResult,
};
use betafield::{CharacterSet, Error};

#[derive(Parser)]
#[command(name = "betafield", version, about = "Degrees of generators for fields of rational invariants of finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Run metadata on standard error
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Gamma and beta for one character set, e.g. `17:8,10,11` or `2x4:(1,0),(1,2)`
    Compute {
        charset: String,
        #[arg(long)]
        json: bool,
        /// Stop the degree search early (status reports if the cap was hit)
        #[arg(long)]
        max_degree: Option<u64>,
    },
    /// Canonical class representatives of m-subsets of nonzero residues mod n
    Classes {
        n: u64,
        m: u64,
        #[arg(long)]
        json: bool,
    },
    /// Every class of one (n, m) cell, with per-class records
    Survey {
        n: u64,
        m: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        json: bool,
        /// Write records as JSON lines
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip classes already present in this JSON-lines file
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Also write records as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Grid of max beta per (p, m) cell over prime rows
    Table {
        /// Prime range, e.g. `3..23` (inclusive) or a single prime
        #[arg(long)]
        primes: String,
        /// Column range, e.g. `1..10` (inclusive) or a single value
        #[arg(long)]
        m: String,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Hilbert series numerator for two characters mod an odd prime
    Hilbert {
        p: u64,
        a1: u64,
        a2: u64,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form bounds for a character set, checked against the engine
    Bounds {
        charset: String,
        #[arg(long)]
        json: bool,
    },
    /// Verify every provable inequality over a range; exits 2 on violations
    Check {
        #[arg(long, default_value_t = 13)]
        n_max: u64,
        #[arg(long, default_value_t = 4)]
        m_max: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here with non-error kinds
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let verbose = cli.verbose;
    match run(cli) {
        Ok(()) => {
            if verbose {
                eprintln!("done in {:.3}s", started.elapsed().as_secs_f64());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Diverged { .. } | Error::Internal(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Compute {
            charset,
            json,
            max_degree,
        } => compute(&charset, json, max_degree),
        Cmd::Classes { n, m, json } => classes(n, m, json),
        Cmd::Survey {
            n,
            m,
            workers,
            json,
            out,
            resume,
            csv,
        } => survey(n, m, workers_or_default(workers), json, out, resume, csv),
        Cmd::Table {
            primes,
            m,
            workers,
            json,
        } => table(&primes, &m, workers_or_default(workers), json),
        Cmd::Hilbert { p, a1, a2, json } => hilbert(p, a1, a2, json),
        Cmd::Bounds { charset, json } => bounds_cmd(&charset, json),
        Cmd::Check {
            n_max,
            m_max,
            workers,
            json,
        } => {
            if check(n_max, m_max, workers_or_default(workers), json)? {
                Ok(())
            } else {
                Err(Error::Internal(
                    "proposition checker found violations".into(),
                ))
            }
        }
    }
}

fn workers_or_default(workers: Option<usize>) -> usize {
    workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

fn point_str(p: &[u64]) -> String {
    let inner: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(","))
}

fn trace_json(trace: &[DegreeTraceRow]) -> serde_json::Value {
    trace
        .iter()
        .map(|row| {
            let index = row.index_in_l.as_ref().map(|ix| match ix.to_u64() {
                Some(v) => json!(v),
                None => json!(ix.to_string()),
            });
            json!({
                "degree": row.degree,
                "new_points": row.new_points,
                "rank": row.rank,
                "index_in_l": index,
            })
        })
        .collect()
}

fn charset_json(s: &CharacterSet) -> serde_json::Value {
    json!({
        "moduli": s.group().moduli(),
        "chars": s.chars().iter().map(|c| c.residues().to_vec()).collect::<Vec<_>>(),
    })
}

fn compute(charset: &str, json: bool, max_degree: Option<u64>) -> Result<(), Error> {
    let s = parse_character_set(charset)?;
    let (_, faithful) = s.image_order();
    match degree_invariants_capped(&s, max_degree)? {
        DegreeOutcome::Complete(r) => {
            if json {
                let mut v = charset_json(&s);
                let obj = v.as_object_mut().expect("object");
                obj.insert("faithful".into(), json!(faithful));
                obj.insert("status".into(), json!("complete"));
                obj.insert("gamma".into(), json!(r.gamma));
                obj.insert("beta".into(), json!(r.beta));
                obj.insert("witnesses_gamma".into(), json!(r.witnesses_gamma));
                obj.insert("witnesses_beta".into(), json!(r.witnesses_beta));
                obj.insert("trace".into(), trace_json(&r.trace));
                println!("{v}");
            } else {
                println!("gamma={} beta={}", r.gamma, r.beta);
                println!("faithful={faithful}");
                let wg: Vec<String> = r.witnesses_gamma.iter().map(|p| point_str(p)).collect();
                println!("witnesses_gamma: {}", wg.join(" "));
                let wb: Vec<String> = r.witnesses_beta.iter().map(|p| point_str(p)).collect();
                println!("witnesses_beta: {}", wb.join(" "));
            }
        }
        DegreeOutcome::CapReached { cap, gamma, trace } => {
            if json {
                let mut v = charset_json(&s);
                let obj = v.as_object_mut().expect("object");
                obj.insert("faithful".into(), json!(faithful));
                obj.insert("status".into(), json!("bound_not_reached"));
                obj.insert("cap".into(), json!(cap));
                obj.insert("gamma".into(), json!(gamma));
                obj.insert("trace".into(), trace_json(&trace));
                println!("{v}");
            } else {
                println!("status=bound_not_reached cap={cap}");
                match gamma {
                    Some(g) => println!("gamma={g} beta=>? (not reached)"),
                    None => println!("gamma=>? beta=>? (not reached)"),
                }
            }
        }
    }
    Ok(())
}

fn classes(n: u64, m: u64, json: bool) -> Result<(), Error> {
    for class in enumerate_classes(n, m as usize)? {
        if json {
            println!("{}", serde_json::to_string(&class)?);
        } else {
            let parts: Vec<String> = class.iter().map(|a| a.to_string()).collect();
            println!("{}", parts.join(","));
        }
    }
    Ok(())
}

fn survey(
    n: u64,
    m: u64,
    workers: usize,
    json: bool,
    out: Option<PathBuf>,
    resume: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<(), Error> {
    let cache = match &resume {
        Some(path) => load_cache(path)?,
        None => Default::default(),
    };
    let cs = survey_cell_with_cache(n, m, workers, &cache)?;

    if let Some(path) = &out {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_jsonl(&cs.records, &mut file)?;
        file.flush()?;
    }
    if let Some(path) = &csv {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_csv(&cs.records, &mut file)?;
        file.flush()?;
    }
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    if out.is_none() {
        if json {
            write_jsonl(&cs.records, &mut w)?;
        } else {
            for r in &cs.records {
                writeln!(
                    w,
                    "n={} m={} class={} beta={} gamma={} faithful={}",
                    r.n,
                    r.m,
                    class_label(&r.class),
                    r.beta,
                    r.gamma,
                    r.faithful
                )?;
            }
        }
    }
    if json {
        writeln!(w, "{}", serde_json::to_string(&cs.cell)?)?;
    } else {
        let argmax: Vec<String> = cs.cell.argmax_classes.iter().map(|c| class_label(c)).collect();
        writeln!(
            w,
            "max_beta={} classes={} argmax={}",
            cs.cell.max_beta,
            cs.cell.class_count,
            argmax.join(" ")
        )?;
    }
    Ok(())
}

fn parse_range(text: &str, what: &str) -> Result<(u64, u64), Error> {
    let bad = || Error::BadInput(format!("bad {what} range `{text}`, expected `lo..hi` or one value"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = lo.trim().parse::<u64>().map_err(|_| bad())?;
        let hi = hi.trim().parse::<u64>().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok((lo, hi))
    } else {
        let v = text.trim().parse::<u64>().map_err(|_| bad())?;
        Ok((v, v))
    }
}

fn table(primes: &str, m: &str, workers: usize, json: bool) -> Result<(), Error> {
    let (p_lo, p_hi) = parse_range(primes, "prime")?;
    let (m_lo, m_hi) = parse_range(m, "m")?;
    if m_lo < 1 {
        return Err(Error::BadInput("m must be at least 1".into()));
    }
    let primes: Vec<u64> = (p_lo.max(3)..=p_hi).filter(|&p| bounds::is_prime(p)).collect();
    if primes.is_empty() {
        return Err(Error::BadInput(format!("no odd primes in {p_lo}..{p_hi}")));
    }
    let cells = betafield::survey::table_cells(&primes, m_lo, m_hi, workers)?;
    if json {
        for c in &cells {
            println!("{}", serde_json::to_string(c)?);
        }
        return Ok(());
    }
    let cell_map: std::collections::HashMap<(u64, u64), &CellResult> =
        cells.iter().map(|c| ((c.n, c.m), c)).collect();
    print!("{:>5}", "p\\m");
    for m in m_lo..=m_hi {
        print!("{m:>5}");
    }
    println!();
    for &p in &primes {
        print!("{p:>5}");
        for m in m_lo..=m_hi {
            match cell_map.get(&(p, m)) {
                Some(c) => print!("{:>5}", c.max_beta),
                None => print!("{:>5}", ""),
            }
        }
        println!();
    }
    Ok(())
}

fn hilbert(p: u64, a1: u64, a2: u64, json: bool) -> Result<(), Error> {
    let h = hilbert_numerator(p, a1, a2)?;
    let props = verify_hilbert_properties(&h);
    if !props.all_hold() {
        return Err(Error::Internal(format!(
            "hilbert properties failed for p={p} ({a1},{a2}): {props:?}"
        )));
    }
    if json {
        println!(
            "{}",
            json!({"p": h.p, "A1": h.a1, "A2": h.a2, "D": h.exponents})
        );
    } else {
        println!("{h}");
    }
    Ok(())
}

fn kind_label(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::LowerBound => "lower",
        BoundKind::UpperBound => "upper",
        BoundKind::Exact => "exact",
        BoundKind::Conjectural => "conjectural",
    }
}

struct BoundLine {
    name: &'static str,
    value: u64,
    kind: BoundKind,
    satisfied: bool,
    certificate: Option<String>,
}

fn bounds_cmd(charset: &str, json: bool) -> Result<(), Error> {
    let s = parse_character_set(charset)?;
    let m = s.len() as u64;
    let (image, faithful) = s.image_order();
    let r = betafield::degrees::degree_invariants(&s)?;
    let mut lines = Vec::new();

    let root = int_root_lower_bound(image, m as u32) as u64;
    lines.push(BoundLine {
        name: "root_lower",
        value: root,
        kind: BoundKind::LowerBound,
        satisfied: r.gamma >= root,
        certificate: None,
    });
    let floor = hard_floor(&s);
    lines.push(BoundLine {
        name: "hard_floor",
        value: floor.floor,
        kind: BoundKind::LowerBound,
        satisfied: r.gamma >= floor.floor && (r.gamma == 2) == floor.all_involutions,
        certificate: floor
            .all_involutions
            .then(|| "every character is an involution".to_string()),
    });
    if bounds::close_implies_equal(image, m as u32, r.gamma) {
        lines.push(BoundLine {
            name: "close_to_bottom",
            value: r.gamma,
            kind: BoundKind::Exact,
            satisfied: r.beta == r.gamma,
            certificate: Some("gamma^m < 2 * image order forces beta = gamma".to_string()),
        });
    }
    if s.group().is_cyclic() {
        let n = s.group().moduli()[0];
        lines.push(BoundLine {
            name: "conjecture",
            value: bounds::conjecture_bound(n, m),
            kind: BoundKind::Conjectural,
            satisfied: r.beta <= bounds::conjecture_bound(n, m),
            certificate: None,
        });
        if bounds::is_prime(n) && n % 2 == 1 {
            let residues: Vec<u64> = s.chars().iter().map(|c| c.residues()[0]).collect();
            if m == 2 {
                let prof = two_char_profile(n, residues[0], residues[1])?;
                let report = qbr_bound(&prof);
                let satisfied = if report.kind == BoundKind::Exact {
                    r.beta == report.value
                } else {
                    r.beta <= report.value
                };
                lines.push(BoundLine {
                    name: "qbr",
                    value: report.value,
                    kind: report.kind,
                    satisfied,
                    certificate: report.certificate,
                });
                match bounds::half_bound(n, residues[0], residues[1])? {
                    Some(v) => lines.push(BoundLine {
                        name: "upper_half",
                        value: v,
                        kind: BoundKind::UpperBound,
                        satisfied: r.beta <= v,
                        certificate: None,
                    }),
                    None => lines.push(BoundLine {
                        name: "inverse_pair",
                        value: n,
                        kind: BoundKind::Exact,
                        satisfied: r.beta == n,
                        certificate: Some("inverse pairs have beta = p".to_string()),
                    }),
                }
                let sqrt = sqrt_lower_bound(n)?;
                lines.push(BoundLine {
                    name: "sqrt_lower",
                    value: sqrt.bound,
                    kind: BoundKind::LowerBound,
                    satisfied: r.beta >= sqrt.bound,
                    certificate: sqrt
                        .extremal
                        .map(|e| format!("attainable, d={} class={}", e.d, class_label(&e.class))),
                });
            } else if m >= 3 {
                lines.push(BoundLine {
                    name: "upper_half",
                    value: (n + 3) / 2,
                    kind: BoundKind::UpperBound,
                    satisfied: r.beta <= (n + 3) / 2,
                    certificate: None,
                });
            }
        }
    }

    if json {
        let bound_values: Vec<serde_json::Value> = lines
            .iter()
            .map(|l| {
                json!({
                    "name": l.name,
                    "value": l.value,
                    "kind": kind_label(l.kind),
                    "satisfied": l.satisfied,
                    "certificate": l.certificate,
                })
            })
            .collect();
        let mut v = charset_json(&s);
        let obj = v.as_object_mut().expect("object");
        obj.insert("faithful".into(), json!(faithful));
        obj.insert("gamma".into(), json!(r.gamma));
        obj.insert("beta".into(), json!(r.beta));
        obj.insert("bounds".into(), json!(bound_values));
        println!("{v}");
    } else {
        println!("gamma={} beta={} faithful={}", r.gamma, r.beta, faithful);
        for l in &lines {
            print!(
                "bound {} value={} kind={} satisfied={}",
                l.name,
                l.value,
                kind_label(l.kind),
                l.satisfied
            );
            match &l.certificate {
                Some(c) => println!(" certificate=\"{c}\""),
                None => println!(),
            }
        }
    }
    if lines.iter().any(|l| !l.satisfied) {
        return Err(Error::Internal(
            "engine result violates a proven bound".into(),
        ));
    }
    Ok(())
}

fn check(n_max: u64, m_max: u64, workers: usize, json: bool) -> Result<bool, Error> {
    let violations = check_propositions(n_max, m_max, workers)?;
    if json {
        println!(
            "{}",
            json!({"n_max": n_max, "m_max": m_max, "violations": violations})
        );
    } else {
        for v in &violations {
            println!("{v}");
        }
        println!("violations={}", violations.len());
    }
    Ok(violations.is_empty())
}
