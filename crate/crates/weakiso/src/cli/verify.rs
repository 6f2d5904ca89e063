//! Oracle-backed verification of the classification statements.
//!
//! A check names a distance set P and the family that is claimed to exhaust
//! the P-preserving maps. It passes when the searched group's exact order
//! equals the family's parametrized count and every normalized generator
//! classifies into the claimed class (or a stronger one: the classifier
//! reports the finest label, and an isometry inside a larger class is
//! consistent with the claim, not a violation).

use std::collections::BTreeMap;
use std::fs;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use crate::bitword::Dimension;
use crate::classify::{classify_with, ClassTag};
use crate::cubemap::PreservedSet;
use crate::families::{param_space_size, Family};
use crate::groupsearch::aut_group_with_limit;
use crate::{Error, Result};

use super::{print_json, search_limit, spectrum_options, Cli};

#[derive(Args)]
pub struct VerifyArgs {
    /// Statement id: lemma1, lemma2, thm2, thm3, thm4, thm5, thm6, thm7,
    /// sec3.5, thm-krasin, or main.
    theorem: String,

    /// Dimension to check; omit to run every supported default for the id.
    #[arg(long)]
    n: Option<usize>,

    /// Single distance for thm-krasin (default 5).
    #[arg(long)]
    p: Option<usize>,

    /// Distance set for main, comma separated.
    #[arg(long = "P", value_delimiter = ',')]
    distances: Option<Vec<usize>>,
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

/// What the check compared, kept even on passes so reruns are comparable.
#[derive(Serialize)]
pub struct Evidence {
    /// Distance set handed to the group search.
    pub p: Vec<usize>,
    /// Exact searched group order, decimal.
    pub oracle_order: String,
    /// Parametrized family count, decimal; absent for open-ended checks.
    pub expected_order: Option<String>,
    /// Family whose count was compared.
    pub family: Option<&'static str>,
    /// Classification labels over the normalized generators.
    pub generator_tags: BTreeMap<String, usize>,
    /// Generators whose label fell outside the claimed classes.
    pub offending_generators: usize,
    /// Map file holding the first offending generator, when any.
    pub counterexample: Option<String>,
}

#[derive(Serialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub n: usize,
    pub status: Status,
    pub evidence: Evidence,
    /// Wall time; excluded from JSON so repeated runs stay byte-identical.
    #[serde(skip)]
    pub wall_ms: u128,
}

struct Check {
    id: &'static str,
    n: usize,
    p: Vec<usize>,
    family: Option<Family>,
    accept: &'static [ClassTag],
    /// Search-dimension ceiling this check needs (slow targets raise it).
    limit: usize,
}

const ISOMETRY_ONLY: &[ClassTag] = &[ClassTag::Isometry];
const EVEN_OR_FINER: &[ClassTag] = &[ClassTag::Isometry, ClassTag::EvenIsometry];
const HALF_OR_FINER: &[ClassTag] =
    &[ClassTag::Isometry, ClassTag::EvenIsometry, ClassTag::HalfAndN];
const MID_SIGMA: &[ClassTag] = &[ClassTag::Isometry, ClassTag::MidPlus];
const MID_SPLIT: &[ClassTag] = &[
    ClassTag::Isometry,
    ClassTag::EvenIsometry,
    ClassTag::MidPlus,
    ClassTag::Triple,
];
const TRIPLE_OR_FINER: &[ClassTag] =
    &[ClassTag::Isometry, ClassTag::EvenIsometry, ClassTag::Triple];
const TOP_OR_FINER: &[ClassTag] = &[
    ClassTag::Isometry,
    ClassTag::EvenIsometry,
    ClassTag::HalfAndN,
    ClassTag::Triple,
    ClassTag::NOnly,
];
const ANY_CLASSIFIED: &[ClassTag] = &[
    ClassTag::Isometry,
    ClassTag::EvenIsometry,
    ClassTag::HalfAndN,
    ClassTag::MidPlus,
    ClassTag::Triple,
    ClassTag::NOnly,
];

fn unsupported(id: &str, detail: String) -> Error {
    Error::Parse(format!("verify {id}: {detail}"))
}

/// Expand a verify invocation into concrete checks. A requested n outside
/// the supported matrix is a usage error; minutes-scale targets additionally
/// need --slow.
fn build_checks(args: &VerifyArgs, slow: bool) -> Result<Vec<Check>> {
    let id = args.theorem.as_str();
    let pick = |defaults: &[usize]| -> Result<Vec<usize>> {
        match args.n {
            None => Ok(defaults.to_vec()),
            Some(n) if defaults.contains(&n) => Ok(vec![n]),
            Some(n) => Err(unsupported(
                id,
                format!("n = {n} is outside the supported set {defaults:?}"),
            )),
        }
    };
    if !matches!(id, "thm-krasin") && args.p.is_some() {
        return Err(unsupported(id, "--p applies only to thm-krasin".into()));
    }
    if !matches!(id, "main") && args.distances.is_some() {
        return Err(unsupported(id, "--P applies only to main".into()));
    }

    let checks = match id {
        "lemma1" => pick(&[2, 3, 4, 5, 6])?
            .into_iter()
            .map(|n| Check {
                id: "lemma1",
                n,
                p: vec![1],
                family: Some(Family::Isometry),
                accept: ISOMETRY_ONLY,
                limit: 7,
            })
            .collect(),
        "lemma2" => pick(&[3, 4, 5, 6])?
            .into_iter()
            .map(|n| Check {
                id: "lemma2",
                n,
                p: vec![2],
                family: Some(Family::EvenIsometry),
                accept: EVEN_OR_FINER,
                limit: 7,
            })
            .collect(),
        "thm2" => pick(&[3, 4, 5])?
            .into_iter()
            .map(|n| Check {
                id: "thm2",
                n,
                p: (2..=n).step_by(2).collect(),
                family: Some(Family::EvenIsometry),
                accept: EVEN_OR_FINER,
                limit: 7,
            })
            .collect(),
        "thm3" => pick(&[2, 3, 4, 5])?
            .into_iter()
            .map(|n| Check {
                id: "thm3",
                n,
                p: vec![n],
                family: Some(Family::NIsometry),
                accept: TOP_OR_FINER,
                limit: 7,
            })
            .collect(),
        "thm4" => pick(&[6])?
            .into_iter()
            .map(|n| Check {
                id: "thm4",
                n,
                p: vec![n / 2, n],
                family: Some(Family::HalfCase1),
                accept: HALF_OR_FINER,
                limit: 7,
            })
            .collect(),
        "thm5" => {
            let defaults: &[usize] = if slow { &[4, 8] } else { &[4] };
            if args.n == Some(8) && !slow {
                return Err(unsupported(id, "n = 8 runs for minutes; pass --slow".into()));
            }
            pick(defaults)?
                .into_iter()
                .map(|n| Check {
                    id: "thm5",
                    n,
                    p: vec![n / 2, n],
                    family: Some(Family::HalfCase2),
                    accept: HALF_OR_FINER,
                    limit: if n > 7 { n } else { 7 },
                })
                .collect()
        }
        "thm6" => pick(&[5, 7])?
            .into_iter()
            .map(|n| Check {
                id: "thm6",
                n,
                p: vec![(n + 1) / 2],
                family: Some(Family::MidPlus),
                accept: if n % 4 == 1 { MID_SIGMA } else { MID_SPLIT },
                limit: 7,
            })
            .collect(),
        "thm7" => pick(&[3, 7])?
            .into_iter()
            .map(|n| Check {
                id: "thm7",
                n,
                p: vec![(n - 1) / 2, (n + 1) / 2, n],
                family: Some(Family::Triple),
                accept: TRIPLE_OR_FINER,
                limit: 7,
            })
            .collect(),
        "sec3.5" => {
            let defaults: &[usize] = if slow { &[5, 7] } else { &[5] };
            if args.n == Some(7) && !slow {
                return Err(unsupported(id, "n = 7 runs long; pass --slow".into()));
            }
            pick(defaults)?
                .into_iter()
                .map(|n| Check {
                    id: "sec3.5",
                    n,
                    p: vec![(n - 1) / 2],
                    family: Some(if n % 4 == 1 { Family::EvenIsometry } else { Family::Triple }),
                    accept: if n % 4 == 1 { EVEN_OR_FINER } else { TRIPLE_OR_FINER },
                    limit: 7,
                })
                .collect()
        }
        "thm-krasin" => {
            let p = args.p.unwrap_or(5);
            let pairs = [(6usize, 5usize), (7, 5)];
            let ns = pick(&[6, 7])?;
            let mut checks = Vec::new();
            for n in ns {
                if !pairs.contains(&(n, p)) {
                    return Err(unsupported(
                        "thm-krasin",
                        format!("supported (n, p) pairs are {pairs:?}, got ({n}, {p})"),
                    ));
                }
                checks.push(Check {
                    id: "thm-krasin",
                    n,
                    p: vec![p],
                    family: Some(Family::Isometry),
                    accept: ISOMETRY_ONLY,
                    limit: 7,
                });
            }
            checks
        }
        "main" => {
            let n = args
                .n
                .ok_or_else(|| unsupported("main", "requires --n".into()))?;
            let p = args
                .distances
                .clone()
                .ok_or_else(|| unsupported("main", "requires --P".into()))?;
            vec![Check { id: "main", n, p, family: None, accept: ANY_CLASSIFIED, limit: 7 }]
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown verification id {other:?}; known ids: lemma1 lemma2 thm2 thm3 thm4 \
                 thm5 thm6 thm7 sec3.5 thm-krasin main"
            )))
        }
    };
    Ok(checks)
}

fn run_check(cli: &Cli, check: &Check) -> Result<VerificationReport> {
    let started = Instant::now();
    let n = Dimension::new(check.n)?;
    let p = PreservedSet::from_distances(n, &check.p)?;
    let group = aut_group_with_limit(n, &p, check.limit.max(search_limit()))?;

    let oracle_order = group.order();
    let expected = match check.family {
        Some(family) => Some(param_space_size(family, n)?),
        None => None,
    };

    let opts = spectrum_options(cli.threads);
    let mut generator_tags: BTreeMap<String, usize> = BTreeMap::new();
    let mut offending = 0usize;
    let mut first_offender = None;
    for g in group.generators() {
        let label = classify_with(g, &opts)?;
        *generator_tags.entry(label.tag.to_string()).or_default() += 1;
        if !check.accept.contains(&label.tag) {
            offending += 1;
            if first_offender.is_none() {
                first_offender = Some(g);
            }
        }
    }

    let order_ok = expected.as_ref().is_none_or(|e| *e == oracle_order);
    let counterexample = match first_offender {
        Some(g) => {
            let path = format!("counterexample-{}-n{}.map", check.id, check.n);
            fs::write(&path, g.to_text())?;
            Some(path)
        }
        None => None,
    };

    Ok(VerificationReport {
        theorem: check.id.to_string(),
        n: check.n,
        status: if order_ok && offending == 0 { Status::Pass } else { Status::Fail },
        evidence: Evidence {
            p: p.distances(),
            oracle_order: oracle_order.to_string(),
            expected_order: expected.map(|e| e.to_string()),
            family: check.family.map(|f| f.as_str()),
            generator_tags,
            offending_generators: offending,
            counterexample,
        },
        wall_ms: started.elapsed().as_millis(),
    })
}

fn print_human(report: &VerificationReport) {
    let e = &report.evidence;
    let verdict = if report.status == Status::Pass { "pass" } else { "FAIL" };
    let p = e.p.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
    let order_note = match (&e.expected_order, &e.family) {
        (Some(expected), Some(family)) => {
            format!("oracle order {} vs {} {} maps", e.oracle_order, expected, family)
        }
        _ => format!("oracle order {}", e.oracle_order),
    };
    let tags = e
        .generator_tags
        .iter()
        .map(|(tag, count)| format!("{tag} x{count}"))
        .collect::<Vec<_>>()
        .join(", ");
    print!(
        "verify {} n={} P={{{}}}: {} [{}; generators: {}; {} ms]",
        report.theorem, report.n, p, verdict, order_note, tags, report.wall_ms
    );
    match &e.counterexample {
        Some(path) => println!(" counterexample written to {path}"),
        None => println!(),
    }
}

pub fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<i32> {
    let checks = build_checks(args, cli.slow)?;
    let mut reports = Vec::with_capacity(checks.len());
    let mut failed = false;
    for check in &checks {
        let report = run_check(cli, check)?;
        failed |= report.status == Status::Fail;
        if !cli.json {
            print_human(&report);
        }
        reports.push(report);
    }
    if cli.json {
        print_json(&reports)?;
    }
    Ok(if failed { 4 } else { 0 })
}
