//! Command implementations behind the `zonostrat` binary. Every command
//! returns its output as a string together with a pass flag, so that the
//! binary only handles arguments, files and exit codes.

pub mod input;
pub mod render;
pub mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use zonostrat_core::restrict::restriction_report;
use zonostrat_core::strata::{brute_force_strata, correspondence_report, enumerate_strata};
use zonostrat_core::Error as CoreError;

use input::{ints, Int, LoadedInstance};
use report::{one_based, stratum_row, theta_rows, Report, StratumRow, ThetaRow};

/// Output of a command and whether every check passed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

pub fn analyze(input: &LoadedInstance, printed: bool) -> Output {
    let report = report::analyze(input, printed);
    Output {
        passed: report.all_pass(),
        text: to_json(&report),
    }
}

pub fn parse_report(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

/// Side-by-side oracle table. With `strata_oracle`, also compares the
/// domain scan with the enumerated strata, which needs full rank.
pub fn oracle(input: &LoadedInstance, strata_oracle: bool) -> anyhow::Result<Output> {
    let inst = &input.instance;
    let brute = if strata_oracle {
        match brute_force_strata(inst) {
            Ok(labels) => Some(labels),
            Err(e @ CoreError::RankDeficient { .. }) => bail!(e),
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let stanley = inst.stanley_count();
    let closed = inst.closed_lattice_points().len();
    let corr = correspondence_report(inst);
    let agree = corr.records.iter().filter(|r| r.zero_sets_agree).count();

    let mut rows: Vec<(String, String, String, bool)> = vec![(
        "closed lattice points".into(),
        format!("stanley {stanley}"),
        format!("enumerated {closed}"),
        stanley == BigInt::from(closed),
    )];
    if let Some(labels) = &brute {
        let mut enumerated: Vec<Vec<BigInt>> = corr.records.iter().map(|r| r.stratum.label.clone()).collect();
        enumerated.sort();
        rows.push((
            "strata".into(),
            format!("scan {}", labels.len()),
            format!("enumerated {}", enumerated.len()),
            *labels == enumerated,
        ));
    }
    rows.push((
        "zero sets".into(),
        format!("cube {}", corr.records.len()),
        format!("strata {agree}"),
        agree == corr.records.len(),
    ));

    let mut text = String::new();
    let _ = writeln!(text, "{:<22} {:<16} {:<16} agree", "check", "oracle", "computed");
    for (name, a, b, ok) in &rows {
        let _ = writeln!(text, "{:<22} {:<16} {:<16} {}", name, a, b, if *ok { "yes" } else { "NO" });
    }
    Ok(Output {
        passed: rows.iter().all(|r| r.3),
        text,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaOutput {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    pub theta: Vec<ThetaRow>,
}

pub fn theta(input: &LoadedInstance, printed: bool) -> Output {
    let inst = &input.instance;
    let strata = enumerate_strata(inst);
    let group = zonostrat_core::toric::class_group(inst);
    let out = ThetaOutput {
        free_rank: group.free_rank,
        torsion: ints(&group.torsion),
        theta: theta_rows(input, &strata, printed && input.printed.is_some()),
    };
    Output {
        passed: true,
        text: to_json(&out),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictOutput {
    pub stratum: StratumRow,
    /// Rows form a basis of the lattice in the span of the stratum.
    pub subspace_basis: Vec<Vec<Int>>,
    pub sub_vectors: Vec<Vec<Int>>,
    /// 1-based indices of the vectors kept, in input order.
    pub kept: Vec<usize>,
    pub sub_points: Vec<Vec<Int>>,
    pub images: Vec<Vec<Int>>,
    pub face_points: Vec<Vec<Int>>,
    pub injective: bool,
    pub image_matches: bool,
    pub passed: bool,
}

/// Restriction to the stratum with the given 1-based index.
pub fn restrict(input: &LoadedInstance, index: usize, printed: bool) -> anyhow::Result<Output> {
    let inst = &input.instance;
    let printed = printed && input.printed.is_some();
    let strata = enumerate_strata(inst);
    if index == 0 || index > strata.len() {
        bail!("stratum index {index} is out of range 1..={}", strata.len());
    }
    let s = &strata[index - 1];
    let data = zonostrat_core::restrict::restrict(inst, s);
    let rep = restriction_report(inst, &strata, s);
    let coords = |v: &Vec<BigInt>| ints(&input.coordinates(v, printed));
    let out = RestrictOutput {
        stratum: stratum_row(input, index - 1, s, printed),
        subspace_basis: data.subspace_basis.to_rows().iter().map(|r| ints(r)).collect(),
        sub_vectors: data.sub.vectors().iter().map(|r| ints(r)).collect(),
        kept: data.kept.iter().map(|j| j + 1).collect(),
        sub_points: rep.sub_points.iter().map(|r| ints(r)).collect(),
        images: rep.images.iter().map(coords).collect(),
        face_points: rep.face_points.iter().map(coords).collect(),
        injective: rep.injective,
        image_matches: rep.image_matches,
        passed: rep.passes(),
    };
    debug_assert_eq!(one_based(&s.zero_set), out.stratum.zero_set);
    Ok(Output {
        passed: out.passed,
        text: to_json(&out),
    })
}

/// Writes `arrangement.svg` and, when possible, `zonotope.svg` into `dir`.
/// Returns the files written and a notice for each skipped picture.
pub fn render(input: &LoadedInstance, dir: &Path) -> anyhow::Result<(Vec<PathBuf>, Vec<String>)> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let inst = &input.instance;
    let strata = enumerate_strata(inst);
    let closed = inst.closed_lattice_points();
    let mut written = Vec::new();
    let mut skipped = Vec::new();
    let pictures = [
        ("arrangement.svg", render::arrangement_svg(input, &strata)),
        ("zonotope.svg", render::zonotope_svg(input, &strata, &closed, true)),
    ];
    for (file, picture) in pictures {
        match picture {
            Ok(svg) => {
                let path = dir.join(file);
                std::fs::write(&path, svg).with_context(|| format!("cannot write {}", path.display()))?;
                written.push(path);
            }
            Err(notice) => skipped.push(notice),
        }
    }
    Ok((written, skipped))
}
