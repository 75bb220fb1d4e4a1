//! Batch computation over equivalence classes of character sets: table
//! cells, proposition checkers over ranges, conjecture scans, and
//! JSON-lines persistence with resume.
//!
//! Work is partitioned by lex ranges of the subset-rank space. Workers
//! compute ranges independently and the results are concatenated in rank
//! order, so the output is byte-identical for any worker count.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    self, build_extremal_sm, conjecture_bound, half_bound, int_root_lower_bound, is_prime,
    qbr_bound, two_char_profile, BoundKind,
};
use crate::degrees::degree_invariants;
use crate::groups::{binomial, canonical_class_rep, classes_in_rank_range, CharacterSet};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize, Debug)]
pub struct BoundCheck {
    pub value: u64,
    pub satisfied: bool,
}

/// One computed class: the JSON-lines unit of persistence, keyed by
/// `(n, m, class)`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize, Debug)]
pub struct SurveyRecord {
    pub n: u64,
    pub m: u64,
    pub class: Vec<u64>,
    pub beta: u64,
    pub gamma: u64,
    pub faithful: bool,
    pub bounds: BTreeMap<String, BoundCheck>,
}

pub type RecordKey = (u64, u64, Vec<u64>);

pub fn record_key(r: &SurveyRecord) -> RecordKey {
    (r.n, r.m, r.class.clone())
}

#[derive(Clone, PartialEq, Eq, Serialize, Debug)]
pub struct CellResult {
    pub n: u64,
    pub m: u64,
    pub max_beta: u64,
    pub argmax_classes: Vec<Vec<u64>>,
    pub class_count: u64,
}

#[derive(Clone, Debug)]
pub struct CellSurvey {
    pub cell: CellResult,
    pub records: Vec<SurveyRecord>,
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

/// Compute one class from scratch.
pub fn compute_record(n: u64, class: &[u64]) -> Result<SurveyRecord> {
    let s = CharacterSet::from_cyclic(n, class)?;
    let m = s.len() as u64;
    let r = degree_invariants(&s)?;
    let (image, faithful) = s.image_order();

    let mut checks = BTreeMap::new();
    let root = int_root_lower_bound(image, m as u32) as u64;
    checks.insert(
        "root_lower".to_string(),
        BoundCheck {
            value: root,
            satisfied: r.gamma >= root,
        },
    );
    let conj = conjecture_bound(n, m);
    checks.insert(
        "conjecture".to_string(),
        BoundCheck {
            value: conj,
            satisfied: r.beta <= conj,
        },
    );
    if is_prime(n) && n % 2 == 1 {
        if m == 2 {
            let report = qbr_bound(&two_char_profile(n, class[0], class[1])?);
            let satisfied = if report.kind == BoundKind::Exact {
                r.beta == report.value
            } else {
                r.beta <= report.value
            };
            checks.insert(
                "qbr".to_string(),
                BoundCheck {
                    value: report.value,
                    satisfied,
                },
            );
            if let Some(v) = half_bound(n, class[0], class[1])? {
                checks.insert(
                    "upper_half".to_string(),
                    BoundCheck {
                        value: v,
                        satisfied: r.beta <= v,
                    },
                );
            }
        } else if m >= 3 {
            let v = (n + 3) / 2;
            checks.insert(
                "upper_half".to_string(),
                BoundCheck {
                    value: v,
                    satisfied: r.beta <= v,
                },
            );
        }
    }

    Ok(SurveyRecord {
        n,
        m,
        class: class.to_vec(),
        beta: r.beta,
        gamma: r.gamma,
        faithful,
        bounds: checks,
    })
}

/// Survey every class of a `(n, m)` cell. Deterministic for any worker
/// count; records come out in canonical class order.
pub fn survey_cell(n: u64, m: u64, workers: usize) -> Result<CellSurvey> {
    survey_cell_with_cache(n, m, workers, &HashMap::new())
}

/// Same, reusing already-computed records (the resume path).
pub fn survey_cell_with_cache(
    n: u64,
    m: u64,
    workers: usize,
    cache: &HashMap<RecordKey, SurveyRecord>,
) -> Result<CellSurvey> {
    if n < 3 || m < 1 || m > n - 1 {
        return Err(Error::BadRange(format!(
            "need n >= 3 and 1 <= m <= n-1, got n={n} m={m}"
        )));
    }
    let total = binomial(n - 1, m);
    let workers = workers.max(1);
    let chunks = (workers as u128 * 8).min(total).max(1);
    let step = total.div_ceil(chunks);

    let pool = thread_pool(workers)?;
    let per_chunk: Vec<(Vec<SurveyRecord>, u128)> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|ci| {
                let lo = (ci * step).min(total);
                let hi = (lo + step).min(total);
                let mut records = Vec::new();
                let mut orbit_total: u128 = 0;
                for (class, orbit) in classes_in_rank_range(n, m as usize, lo, hi)? {
                    orbit_total += orbit as u128;
                    let key = (n, m, class.clone());
                    let record = match cache.get(&key) {
                        Some(r) => r.clone(),
                        None => compute_record(n, &class)?,
                    };
                    records.push(record);
                }
                Ok((records, orbit_total))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut records = Vec::new();
    let mut orbit_total: u128 = 0;
    for (rs, o) in per_chunk {
        records.extend(rs);
        orbit_total += o;
    }
    if orbit_total != total {
        return Err(Error::Internal(format!(
            "orbit sizes sum to {orbit_total}, expected C({}, {m}) = {total}",
            n - 1
        )));
    }

    let max_beta = records.iter().map(|r| r.beta).max().expect("cell has classes");
    let argmax_classes = records
        .iter()
        .filter(|r| r.beta == max_beta)
        .map(|r| r.class.clone())
        .collect();
    Ok(CellSurvey {
        cell: CellResult {
            n,
            m,
            max_beta,
            argmax_classes,
            class_count: records.len() as u64,
        },
        records,
    })
}

/// All cells `(p, m)` for the given primes and `m_lo..=min(m_hi, p-1)`.
pub fn table_cells(
    primes: &[u64],
    m_lo: u64,
    m_hi: u64,
    workers: usize,
) -> Result<Vec<CellResult>> {
    let mut cells = Vec::new();
    for &p in primes {
        for m in m_lo..=m_hi.min(p - 1) {
            cells.push(survey_cell(p, m, workers)?.cell);
        }
    }
    Ok(cells)
}

// ---------------------------------------------------------------------------
// Persistence: JSON lines (source of truth) and derived CSV
// ---------------------------------------------------------------------------

pub fn write_jsonl<W: Write>(records: &[SurveyRecord], w: &mut W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut *w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<SurveyRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Load a resume cache; a missing file is an empty cache.
pub fn load_cache(path: &Path) -> Result<HashMap<RecordKey, SurveyRecord>> {
    if !path.exists() {
        return Ok(HashMap::new());
    }
    let file = std::fs::File::open(path)?;
    let records = read_jsonl(std::io::BufReader::new(file))?;
    Ok(records.into_iter().map(|r| (record_key(&r), r)).collect())
}

pub fn class_label(class: &[u64]) -> String {
    class
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join("|")
}

pub fn write_csv<W: Write>(records: &[SurveyRecord], w: &mut W) -> Result<()> {
    writeln!(w, "n,m,class,beta,gamma,faithful")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.n,
            r.m,
            class_label(&r.class),
            r.beta,
            r.gamma,
            r.faithful
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Proposition checker
// ---------------------------------------------------------------------------

/// A failed inequality, with the instance and both sides.
#[derive(Clone, PartialEq, Eq, Serialize, Debug)]
pub struct Violation {
    pub proposition: String,
    pub instance: String,
    pub lhs: u64,
    pub relation: String,
    pub rhs: u64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} violated at {}: {} {} {} is false",
            self.proposition, self.instance, self.lhs, self.relation, self.rhs
        )
    }
}

fn expect(
    out: &mut Vec<Violation>,
    ok: bool,
    proposition: &str,
    instance: String,
    lhs: u64,
    relation: &str,
    rhs: u64,
) {
    if !ok {
        out.push(Violation {
            proposition: proposition.to_string(),
            instance,
            lhs,
            relation: relation.to_string(),
            rhs,
        });
    }
}

/// Check every provable inequality over all classes of all odd primes
/// `p <= n_max` with `1 <= m <= min(m_max, p-1)`. The expected result is
/// the empty list; any entry points at an implementation bug.
pub fn check_propositions(n_max: u64, m_max: u64, workers: usize) -> Result<Vec<Violation>> {
    let mut violations = Vec::new();
    let primes: Vec<u64> = (3..=n_max).filter(|&p| is_prime(p)).collect();
    let pool = thread_pool(workers)?;

    for &p in &primes {
        // levels[m] maps each canonical class at size m to (beta, gamma)
        let mut levels: Vec<HashMap<Vec<u64>, (u64, u64)>> = vec![HashMap::new()];
        for m in 1..=m_max.min(p - 1) {
            let total = binomial(p - 1, m);
            let chunks = (workers as u128 * 8).min(total).max(1);
            let step = total.div_ceil(chunks);
            let computed: Vec<(Vec<u64>, (u64, u64))> = pool.install(|| {
                (0..chunks)
                    .into_par_iter()
                    .map(|ci| {
                        let lo = (ci * step).min(total);
                        let hi = (lo + step).min(total);
                        classes_in_rank_range(p, m as usize, lo, hi)?
                            .into_iter()
                            .map(|(class, _)| {
                                let s = CharacterSet::from_cyclic(p, &class)?;
                                let r = degree_invariants(&s)?;
                                Ok((class, (r.beta, r.gamma)))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })?
            .into_iter()
            .flatten()
            .collect();

            let level: HashMap<Vec<u64>, (u64, u64)> = computed.iter().cloned().collect();
            levels.push(level);

            let degrees_of = |class: &[u64]| {
                let rep = canonical_class_rep(p, class).expect("valid residues");
                levels[class.len()][&rep]
            };

            for (class, (beta, gamma)) in &computed {
                let inst = format!("{p}:{}", class_label(class));
                let (beta, gamma) = (*beta, *gamma);

                let root = int_root_lower_bound(p as u128, m as u32) as u64;
                expect(
                    &mut violations,
                    gamma >= root,
                    "mth-root lower bound on gamma",
                    inst.clone(),
                    gamma,
                    ">=",
                    root,
                );
                // odd p has no involutions, so the hard floor is 3
                expect(
                    &mut violations,
                    gamma >= 3,
                    "hard floor",
                    inst.clone(),
                    gamma,
                    ">=",
                    3,
                );
                if bounds::close_implies_equal(p as u128, m as u32, gamma) {
                    expect(
                        &mut violations,
                        beta == gamma,
                        "close-to-bottom forces beta = gamma",
                        inst.clone(),
                        beta,
                        "==",
                        gamma,
                    );
                }
                if m == 2 {
                    expect(
                        &mut violations,
                        beta == gamma,
                        "two characters force beta = gamma",
                        inst.clone(),
                        beta,
                        "==",
                        gamma,
                    );
                    let prof = two_char_profile(p, class[0], class[1])?;
                    let report = qbr_bound(&prof);
                    expect(
                        &mut violations,
                        beta <= report.value,
                        "q+b+r-1 upper bound",
                        inst.clone(),
                        beta,
                        "<=",
                        report.value,
                    );
                    if report.kind == BoundKind::Exact {
                        expect(
                            &mut violations,
                            beta == report.value,
                            "q+b+r-1 equality certificate",
                            inst.clone(),
                            beta,
                            "==",
                            report.value,
                        );
                    }
                    match half_bound(p, class[0], class[1])? {
                        Some(v) => expect(
                            &mut violations,
                            beta <= v,
                            "(p+3)/2 upper bound for non-inverse pairs",
                            inst.clone(),
                            beta,
                            "<=",
                            v,
                        ),
                        None => expect(
                            &mut violations,
                            beta == p,
                            "inverse pair has beta = p",
                            inst.clone(),
                            beta,
                            "==",
                            p,
                        ),
                    }
                }
                if m >= 3 {
                    expect(
                        &mut violations,
                        beta <= (p + 3) / 2,
                        "(p+3)/2 upper bound",
                        inst.clone(),
                        beta,
                        "<=",
                        (p + 3) / 2,
                    );
                    // covering pairs of proper subsets: drop-one (nondisjoint),
                    // and an overlapping half split
                    let h = class.len() / 2;
                    let splits: [(Vec<u64>, Vec<u64>); 2] = [
                        (
                            class[..class.len() - 1].to_vec(),
                            class[1..].to_vec(),
                        ),
                        (class[..=h].to_vec(), class[h..].to_vec()),
                    ];
                    for (s1, s2) in splits {
                        let (b1, g1) = degrees_of(&s1);
                        let (b2, g2) = degrees_of(&s2);
                        expect(
                            &mut violations,
                            beta <= b1.max(b2),
                            "beta subset bound",
                            format!("{inst} = {} | {}", class_label(&s1), class_label(&s2)),
                            beta,
                            "<=",
                            b1.max(b2),
                        );
                        expect(
                            &mut violations,
                            gamma <= g1.max(g2),
                            "gamma subset bound",
                            format!("{inst} = {} | {}", class_label(&s1), class_label(&s2)),
                            gamma,
                            "<=",
                            g1.max(g2),
                        );
                    }
                }
            }

            // the extremal construction lands on its predicted value
            let (sm, predicted) = build_extremal_sm(p, m)?;
            let residues: Vec<u64> = sm.chars().iter().map(|c| c.residues()[0]).collect();
            let (beta, gamma) = degrees_of(&residues);
            let inst = format!("{p}:S_{m}={}", class_label(&residues));
            expect(
                &mut violations,
                beta == predicted,
                "extremal construction beta",
                inst.clone(),
                beta,
                "==",
                predicted,
            );
            expect(
                &mut violations,
                gamma == predicted,
                "extremal construction gamma",
                inst,
                gamma,
                "==",
                predicted,
            );
        }
    }
    Ok(violations)
}

// ---------------------------------------------------------------------------
// Conjecture scan
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Serialize, Debug)]
pub enum ScanStatus {
    #[serde(rename = "HOLDS")]
    Holds,
    #[serde(rename = "COUNTEREXAMPLE")]
    Counterexample,
}

#[derive(Clone, PartialEq, Eq, Serialize, Debug)]
pub struct ScanEntry {
    pub p: u64,
    pub m: u64,
    pub bound: u64,
    pub max_beta: u64,
    pub status: ScanStatus,
    /// Classes exceeding the bound; empty when the conjecture holds.
    pub counterexamples: Vec<Vec<u64>>,
}

/// Compare every cell's max beta against the conjectured bound. Purely a
/// report; the conjecture is never assumed anywhere.
pub fn conjecture_scan(primes: &[u64], m_max: u64, workers: usize) -> Result<Vec<ScanEntry>> {
    let mut out = Vec::new();
    for &p in primes {
        for m in 1..=m_max.min(p - 1) {
            let cell = survey_cell(p, m, workers)?;
            let bound = conjecture_bound(p, m);
            let counterexamples: Vec<Vec<u64>> = cell
                .records
                .iter()
                .filter(|r| r.beta > bound)
                .map(|r| r.class.clone())
                .collect();
            out.push(ScanEntry {
                p,
                m,
                bound,
                max_beta: cell.cell.max_beta,
                status: if counterexamples.is_empty() {
                    ScanStatus::Holds
                } else {
                    ScanStatus::Counterexample
                },
                counterexamples,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_5_2() {
        let cs = survey_cell(5, 2, 1).unwrap();
        assert_eq!(cs.cell.max_beta, 5);
        assert_eq!(cs.cell.argmax_classes, vec![vec![1, 4]]);
        assert_eq!(cs.cell.class_count, 2);
        assert_eq!(cs.records[0].class, vec![1, 2]);
        assert_eq!((cs.records[0].beta, cs.records[0].gamma), (4, 4));
        assert!(cs.records.iter().all(|r| r.faithful));
        assert!(cs
            .records
            .iter()
            .all(|r| r.bounds.values().all(|b| b.satisfied)));
    }

    #[test]
    fn worker_count_does_not_change_the_bytes() {
        let runs: Vec<String> = [1usize, 4, 8]
            .iter()
            .map(|&w| {
                let cs = survey_cell(13, 3, w).unwrap();
                let mut buf = Vec::new();
                write_jsonl(&cs.records, &mut buf).unwrap();
                String::from_utf8(buf).unwrap()
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }

    #[test]
    fn resume_reproduces_the_uninterrupted_file() {
        let full = survey_cell(11, 3, 2).unwrap();
        let mut want = Vec::new();
        write_jsonl(&full.records, &mut want).unwrap();

        // simulate an interrupt after 4 records
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cell.jsonl");
        let mut partial = Vec::new();
        write_jsonl(&full.records[..4], &mut partial).unwrap();
        std::fs::write(&path, &partial).unwrap();

        let cache = load_cache(&path).unwrap();
        assert_eq!(cache.len(), 4);
        let resumed = survey_cell_with_cache(11, 3, 2, &cache).unwrap();
        let mut got = Vec::new();
        write_jsonl(&resumed.records, &mut got).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn jsonl_round_trip_and_schema() {
        let cs = survey_cell(5, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&cs.records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with(r#"{"n":5,"m":2,"class":[1,2],"beta":4,"gamma":4,"faithful":true,"bounds":{"#));
        let back = read_jsonl(std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(back, cs.records);
    }

    #[test]
    fn csv_schema() {
        let cs = survey_cell(5, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&cs.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,m,class,beta,gamma,faithful\n5,2,1|2,4,4,true\n5,2,1|4,5,5,true\n"
        );
    }

    #[test]
    fn missing_cache_file_is_empty() {
        let cache = load_cache(Path::new("/nonexistent/definitely/not/here.jsonl")).unwrap();
        assert!(cache.is_empty());
    }

    #[test]
    fn checker_small_ranges_are_clean() {
        assert!(check_propositions(3, 2, 2).unwrap().is_empty());
        assert!(check_propositions(7, 6, 2).unwrap().is_empty());
    }

    #[test]
    fn scan_small_primes_hold() {
        let entries = conjecture_scan(&[5, 7], 6, 2).unwrap();
        assert!(entries.iter().all(|e| e.status == ScanStatus::Holds));
        // m = p - 1 lands exactly on max_beta = 3
        let reg = entries.iter().find(|e| e.p == 7 && e.m == 6).unwrap();
        assert_eq!(reg.max_beta, 3);
        // m = 1 lands exactly on max_beta = p
        let one = entries.iter().find(|e| e.p == 7 && e.m == 1).unwrap();
        assert_eq!((one.max_beta, one.bound), (7, 7));
    }

    #[test]
    fn bad_ranges_are_rejected() {
        assert!(matches!(survey_cell(2, 1, 1), Err(Error::BadRange(_))));
        assert!(matches!(survey_cell(7, 7, 1), Err(Error::BadRange(_))));
        assert!(matches!(survey_cell(7, 0, 1), Err(Error::BadRange(_))));
    }
}
