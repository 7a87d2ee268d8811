//! The JSON report written by `analyze`.
//!
//! Vector indices inside zero sets are 1-based, in input order. Stratum
//! indices are 1-based positions in the `strata` table, which is sorted by
//! canonical point coordinates. Rationals are strings `"a/b"` (or `"a"`).

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use zonostrat_core::linalg::Rational;
use zonostrat_core::restrict::restriction_reports;
use zonostrat_core::strata::{brute_force_strata, correspondence_report, Stratum};
use zonostrat_core::toric::{class_group, corollary_report_from, effective_cone, theta_from_strata, GeneratorKind};

use crate::input::{ints, Int, LoadedInstance};

pub const SCHEMA_VERSION: u32 = 1;

/// Exact rational written as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub Rational);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<Rational>()
            .map(Rat)
            .map_err(|_| serde::de::Error::custom(format!("invalid rational {text:?}")))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub name: Option<String>,
    pub instance: InstanceSummary,
    pub strata: Vec<StratumRow>,
    pub theta: Vec<ThetaRow>,
    pub effective_cone: ConeSummary,
    pub verification: Verification,
    pub oracles: Oracles,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub k: usize,
    pub n: usize,
    pub rank: usize,
    pub vectors: Vec<Vec<Int>>,
    /// `"canonical"` or `"printed"`.
    pub coordinates: String,
    /// Rows of the projection the point coordinates refer to.
    pub projection: Vec<Vec<Int>>,
    pub invariant_factors: Vec<Int>,
    pub torsion: Vec<Int>,
    /// Whether `{u : phi · u ∈ Z^k}` is `Z^n`.
    pub preimage_is_standard: bool,
    pub closed_points: usize,
    pub half_open_points: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumRow {
    pub index: usize,
    pub label: Vec<Int>,
    pub zero_set: Vec<usize>,
    pub lift_dim: usize,
    pub witness: Vec<Rat>,
    pub point: Vec<Int>,
    pub face_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub free_part: Vec<Int>,
    pub torsion_part: Vec<Int>,
    pub stratum: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSummary {
    pub generators: Vec<Vec<Int>>,
    /// `"extremal"`, `"redundant"`, `"zero"` or `"duplicate of j"`.
    pub kinds: Vec<String>,
    pub dim: usize,
    pub pointed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub main_theorem: MainTheoremCheck,
    pub corollary: CorollaryCheck,
    pub restriction: RestrictionCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainTheoremCheck {
    pub passed: bool,
    pub strata: usize,
    pub points: usize,
    pub inclusion_pairs: usize,
    pub summary: Vec<DimensionCount>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionCount {
    pub face_dim: usize,
    pub lift_dim: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryCheck {
    pub passed: bool,
    /// Reason the check did not run.
    pub skipped: Option<String>,
    pub theta: usize,
    pub faces: Vec<FaceRow>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRow {
    pub zero_set: Vec<usize>,
    pub tau_dim: usize,
    pub points_on_face: usize,
    pub theta_on_face: usize,
    pub strata_above: usize,
    pub restricted_points: usize,
    pub restricted_theta: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionCheck {
    pub passed: bool,
    pub faces: Vec<RestrictionRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionRow {
    pub zero_set: Vec<usize>,
    pub sub_points: usize,
    pub face_points: usize,
    pub injective: bool,
    pub image_matches: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Oracles {
    pub passed: bool,
    pub stanley_count: Int,
    pub closed_points: usize,
    /// Labels found by scanning the fundamental domain; full rank only.
    pub brute_force_strata: Option<usize>,
    pub brute_force_agrees: Option<bool>,
    /// Cube-side and stratum-side zero sets agree for every stratum.
    pub zero_sets_agree: bool,
}

pub fn one_based(set: &std::collections::BTreeSet<usize>) -> Vec<usize> {
    set.iter().map(|j| j + 1).collect()
}

fn kind_name(kind: GeneratorKind) -> String {
    match kind {
        GeneratorKind::Zero => "zero".into(),
        GeneratorKind::Duplicate(i) => format!("duplicate of {}", i + 1),
        GeneratorKind::Redundant => "redundant".into(),
        GeneratorKind::Extremal => "extremal".into(),
    }
}

pub fn stratum_row(input: &LoadedInstance, index: usize, s: &Stratum, printed: bool) -> StratumRow {
    StratumRow {
        index: index + 1,
        label: ints(&s.label),
        zero_set: one_based(&s.zero_set),
        lift_dim: s.lift_dim,
        witness: s.witness.iter().cloned().map(Rat).collect(),
        point: ints(&input.coordinates(&s.point.p, printed)),
        face_dim: input.instance.face_dimension(&s.zero_set),
    }
}

/// Θ rows pointing into the stratum table (1-based).
pub fn theta_rows(input: &LoadedInstance, strata: &[Stratum], printed: bool) -> Vec<ThetaRow> {
    let inst = &input.instance;
    theta_from_strata(inst, strata)
        .into_iter()
        .map(|t| {
            let stratum = strata
                .iter()
                .position(|s| s.point.p == t.stratum.point.p)
                .expect("theta elements come from the strata");
            ThetaRow {
                free_part: ints(&input.coordinates(&t.free_part, printed)),
                torsion_part: ints(&t.torsion_part),
                stratum: stratum + 1,
            }
        })
        .collect()
}

/// Runs every verifier and oracle. `printed` selects the printed
/// coordinates when the file provides them.
pub fn analyze(input: &LoadedInstance, printed: bool) -> Report {
    let inst = &input.instance;
    let printed = printed && input.printed.is_some();
    let corr = correspondence_report(inst);
    let strata: Vec<Stratum> = corr.records.iter().map(|r| r.stratum.clone()).collect();
    let closed = inst.closed_lattice_points();
    let group = class_group(inst);

    let projection = match (&input.printed, printed) {
        (Some(t), true) => t.mul(inst.pi()),
        _ => inst.pi().clone(),
    };
    let instance = InstanceSummary {
        k: inst.k(),
        n: inst.n(),
        rank: inst.rank(),
        vectors: inst.vectors().iter().map(|v| ints(v)).collect(),
        coordinates: if printed { "printed" } else { "canonical" }.into(),
        projection: projection.to_rows().iter().map(|r| ints(r)).collect(),
        invariant_factors: ints(&group.invariant_factors),
        torsion: ints(&group.torsion),
        preimage_is_standard: inst.preimage().is_standard(),
        closed_points: closed.len(),
        half_open_points: corr.point_count,
    };

    let rows: Vec<StratumRow> = strata
        .iter()
        .enumerate()
        .map(|(i, s)| stratum_row(input, i, s, printed))
        .collect();

    let cone = effective_cone(inst);
    let effective_cone = ConeSummary {
        generators: cone
            .generators
            .iter()
            .map(|g| ints(&input.coordinates(g, printed)))
            .collect(),
        kinds: cone.kinds.iter().map(|&k| kind_name(k)).collect(),
        dim: cone.dim,
        pointed: cone.pointed,
    };

    let main_failures = corr.failures();
    let main_theorem = MainTheoremCheck {
        passed: main_failures.is_empty(),
        strata: corr.records.len(),
        points: corr.point_count,
        inclusion_pairs: corr.inclusion_checks.len(),
        summary: corr
            .summary
            .iter()
            .map(|(&(face_dim, lift_dim), &count)| DimensionCount {
                face_dim,
                lift_dim,
                count,
            })
            .collect(),
        failures: main_failures,
    };

    let corollary = match corollary_report_from(inst, &strata) {
        Ok(rep) => CorollaryCheck {
            passed: rep.all_pass(),
            skipped: None,
            theta: rep.theta_count,
            faces: rep
                .groupings
                .iter()
                .map(|g| FaceRow {
                    zero_set: one_based(&g.zero_set),
                    tau_dim: g.tau_dim,
                    points_on_face: g.free_parts_on_face,
                    theta_on_face: g.theta_on_face,
                    strata_above: g.strata_above,
                    restricted_points: g.restricted_points,
                    restricted_theta: g.restricted_theta,
                    passed: g.passes(),
                })
                .collect(),
            failures: rep.failures(),
        },
        Err(e) => CorollaryCheck {
            passed: true,
            skipped: Some(e.to_string()),
            theta: strata.len() * usize::try_from(group.torsion_order()).unwrap_or(usize::MAX),
            faces: Vec::new(),
            failures: Vec::new(),
        },
    };

    let restriction_rows: Vec<RestrictionRow> = restriction_reports(inst, &strata)
        .iter()
        .map(|r| RestrictionRow {
            zero_set: one_based(&r.zero_set),
            sub_points: r.sub_points.len(),
            face_points: r.face_points.len(),
            injective: r.injective,
            image_matches: r.image_matches,
            passed: r.passes(),
        })
        .collect();
    let restriction = RestrictionCheck {
        passed: restriction_rows.iter().all(|r| r.passed),
        faces: restriction_rows,
    };

    let stanley = inst.stanley_count();
    let brute = brute_force_strata(inst).ok();
    let brute_force_agrees = brute.as_ref().map(|labels| {
        let mut enumerated: Vec<Vec<BigInt>> = strata.iter().map(|s| s.label.clone()).collect();
        enumerated.sort();
        *labels == enumerated
    });
    let zero_sets_agree = corr.records.iter().all(|r| r.zero_sets_agree);
    let oracles = Oracles {
        passed: stanley == BigInt::from(closed.len()) && brute_force_agrees != Some(false) && zero_sets_agree,
        stanley_count: Int(stanley),
        closed_points: closed.len(),
        brute_force_strata: brute.map(|b| b.len()),
        brute_force_agrees,
        zero_sets_agree,
    };

    let verification = Verification {
        passed: main_theorem.passed && corollary.passed && restriction.passed,
        main_theorem,
        corollary,
        restriction,
    };

    Report {
        schema: SCHEMA_VERSION,
        name: input.name.clone(),
        instance,
        strata: rows,
        theta: theta_rows(input, &strata, printed),
        effective_cone,
        verification,
        oracles,
    }
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verification.passed && self.oracles.passed
    }
}
