//! The two-physicist experiment as a spacetime game, plus random-utility
//! ensembles over it.
//!
//! Agents A and B pick measurement axes at spacelike separation; U answers A
//! timelike-later on A's side, V answers B on B's side. U's menu is {0,1}
//! after `a` and {2,3} after `b`; V mirrors that for B. The sixteen
//! realizable worlds get payoffs from per-agent total rankings, so every
//! instance is in general position by construction.
//!
//! Ensembles draw rankings at random per sample, solve each game, and
//! aggregate which axes get picked and which joint outcomes realize. All
//! statistics are exact rationals; a fixed seed reproduces a report
//! byte-for-byte, whether samples are evaluated serially or in parallel.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{AgentId, Outcome, PayoffVector};
use crate::solvers::{solve_pte, PteStatus};
use crate::spacetime::{compile, DecisionEvent, EventCoord, Menu, SpacetimeSpec};

pub const OUTCOME_COUNT: usize = 16;

/// Measurement-pair labels in canonical order.
pub const PAIR_LABELS: [&str; 4] = ["a/c", "a/d", "b/c", "b/d"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EprError {
    #[error("ranking for {role} must be a permutation of 1..=16")]
    InvalidRanking { role: &'static str },
    #[error("shared universe requires a single ranking; drop the \"v\" ranking or the flag")]
    SharedConflict,
    #[error("an ensemble needs at least one sample")]
    NoSamples,
}

/// One of the sixteen realizable worlds.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct EprOutcome {
    /// 0 = axis a, 1 = axis b.
    pub a_axis: u8,
    /// 0 = axis c, 1 = axis d.
    pub b_axis: u8,
    /// U's pick within its menu (0 = first entry).
    pub u_slot: u8,
    pub v_slot: u8,
}

impl EprOutcome {
    /// Canonical index: a then b then u then v, most significant first.
    pub fn index(&self) -> usize {
        (self.a_axis as usize) * 8
            + (self.b_axis as usize) * 4
            + (self.u_slot as usize) * 2
            + self.v_slot as usize
    }

    pub fn from_index(ix: usize) -> Self {
        EprOutcome {
            a_axis: ((ix >> 3) & 1) as u8,
            b_axis: ((ix >> 2) & 1) as u8,
            u_slot: ((ix >> 1) & 1) as u8,
            v_slot: (ix & 1) as u8,
        }
    }

    /// Measurement pair index into [`PAIR_LABELS`].
    pub fn pair(&self) -> usize {
        (self.a_axis * 2 + self.b_axis) as usize
    }

    /// Joint outcome slot within the pair's 2x2 table.
    pub fn joint(&self) -> usize {
        (self.u_slot * 2 + self.v_slot) as usize
    }

    /// U's measured value 0..=3 (menu base plus slot).
    pub fn u_value(&self) -> u8 {
        self.a_axis * 2 + self.u_slot
    }

    pub fn v_value(&self) -> u8 {
        self.b_axis * 2 + self.v_slot
    }

    pub fn a_label(&self) -> &'static str {
        ["a", "b"][self.a_axis as usize]
    }

    pub fn b_label(&self) -> &'static str {
        ["c", "d"][self.b_axis as usize]
    }
}

/// Joint outcome labels `"u/v"` for one measurement pair, in slot order.
pub fn joint_labels(pair: usize) -> [String; 4] {
    let a_axis = (pair / 2) as u8;
    let b_axis = (pair % 2) as u8;
    std::array::from_fn(|joint| {
        let u = a_axis * 2 + (joint / 2) as u8;
        let v = b_axis * 2 + (joint % 2) as u8;
        format!("{u}/{v}")
    })
}

/// Total rankings of the sixteen outcomes: rank 16 is most preferred, every
/// ranking a permutation of 1..=16, indexed by [`EprOutcome::index`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EprUtilities {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
    pub shared_universe: bool,
}

impl EprUtilities {
    pub fn validate(&self) -> Result<(), EprError> {
        check_ranking(&self.a, "a")?;
        check_ranking(&self.b, "b")?;
        check_ranking(&self.u, "u")?;
        check_ranking(&self.v, "v")?;
        if self.shared_universe && self.u != self.v {
            return Err(EprError::SharedConflict);
        }
        Ok(())
    }
}

fn check_ranking(ranking: &[i64], role: &'static str) -> Result<(), EprError> {
    let mut seen = [false; OUTCOME_COUNT];
    if ranking.len() != OUTCOME_COUNT {
        return Err(EprError::InvalidRanking { role });
    }
    for &rank in ranking {
        match usize::try_from(rank - 1).ok().filter(|&r| r < OUTCOME_COUNT) {
            Some(r) if !seen[r] => seen[r] = true,
            _ => return Err(EprError::InvalidRanking { role }),
        }
    }
    Ok(())
}

/// Builds the four-event spacetime spec for one utility profile. A and B sit
/// at spacelike separation; U is timelike after A but spacelike to B and V,
/// and symmetrically for V.
pub fn build_epr_game(utilities: &EprUtilities) -> SpacetimeSpec {
    let coord = EventCoord::from_ints;
    let menu = |condition: Vec<(&str, &str)>, actions: Vec<&str>| Menu {
        condition: condition
            .into_iter()
            .map(|(e, a)| (e.to_owned(), a.to_owned()))
            .collect(),
        actions: actions.into_iter().map(str::to_owned).collect(),
    };
    let events = vec![
        DecisionEvent {
            id: "A".into(),
            agent: 0,
            coord: coord(0, -2, 0, 0),
            menus: vec![menu(vec![], vec!["a", "b"])],
        },
        DecisionEvent {
            id: "B".into(),
            agent: 1,
            coord: coord(0, 2, 0, 0),
            menus: vec![menu(vec![], vec!["c", "d"])],
        },
        DecisionEvent {
            id: "U".into(),
            agent: 2,
            coord: coord(3, -2, 0, 0),
            menus: vec![
                menu(vec![("A", "a")], vec!["0", "1"]),
                menu(vec![("A", "b")], vec!["2", "3"]),
            ],
        },
        DecisionEvent {
            id: "V".into(),
            agent: 3,
            coord: coord(3, 2, 0, 0),
            menus: vec![
                menu(vec![("B", "c")], vec!["0", "1"]),
                menu(vec![("B", "d")], vec!["2", "3"]),
            ],
        },
    ];
    let mut payoffs = std::collections::BTreeMap::new();
    for ix in 0..OUTCOME_COUNT {
        let outcome = EprOutcome::from_index(ix);
        let assignment = vec![
            ("A".to_owned(), outcome.a_label().to_owned()),
            ("B".to_owned(), outcome.b_label().to_owned()),
            ("U".to_owned(), outcome.u_value().to_string()),
            ("V".to_owned(), outcome.v_value().to_string()),
        ];
        payoffs.insert(
            assignment,
            PayoffVector::new(vec![
                utilities.a[ix],
                utilities.b[ix],
                utilities.u[ix],
                utilities.v[ix],
            ]),
        );
    }
    SpacetimeSpec {
        agents: vec![
            AgentId::new("A"),
            AgentId::new("B"),
            AgentId::new("U"),
            AgentId::new("V"),
        ],
        events,
        payoffs,
    }
}

/// Reads the realized world off a solved outcome's path.
pub fn epr_outcome_of(tree: &crate::model::GameTree, outcome: &Outcome) -> Option<EprOutcome> {
    let mut a_axis = None;
    let mut b_axis = None;
    let mut u_slot = None;
    let mut v_slot = None;
    for &(node, action) in &outcome.path {
        let crate::model::Node::Decision { owner, actions, .. } = tree.node(node) else {
            continue;
        };
        let label = actions[action].as_str();
        match tree.agents()[*owner].name() {
            "A" => a_axis = Some(u8::from(label == "b")),
            "B" => b_axis = Some(u8::from(label == "d")),
            "U" => u_slot = Some(label.parse::<u8>().ok()? % 2),
            "V" => v_slot = Some(label.parse::<u8>().ok()? % 2),
            _ => return None,
        }
    }
    Some(EprOutcome {
        a_axis: a_axis?,
        b_axis: b_axis?,
        u_slot: u_slot?,
        v_slot: v_slot?,
    })
}

// ---------------------------------------------------------------------------
// sign maps and the CHSH statistic

/// Maps each measured value 0..=3 to +1 or -1 for the correlators.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SignMap(pub [i8; 4]);

impl Default for SignMap {
    /// Even values count +1, odd values -1.
    fn default() -> Self {
        SignMap([1, -1, 1, -1])
    }
}

impl SignMap {
    /// Parses four `+`/`-` characters, one per measured value.
    pub fn parse(s: &str) -> Option<SignMap> {
        let mut signs = [0i8; 4];
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 4 {
            return None;
        }
        for (slot, c) in chars.iter().enumerate() {
            signs[slot] = match c {
                '+' => 1,
                '-' => -1,
                _ => return None,
            };
        }
        Some(SignMap(signs))
    }

    pub fn sign(&self, value: u8) -> i64 {
        self.0[value as usize] as i64
    }
}

impl fmt::Display for SignMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for sign in self.0 {
            f.write_str(if sign >= 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Correlators per measurement pair and their CHSH combination
/// S = E(a,c) + E(a,d) + E(b,c) - E(b,d). A pair without support leaves its
/// correlator undefined and S uncomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChshReport {
    pub sign_map: SignMap,
    pub correlators: [Option<BigRational>; 4],
    pub s: Option<BigRational>,
}

/// Aggregate of one ensemble run; exact counts only, every statistic derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnsembleReport {
    pub samples: u64,
    pub seed: u64,
    /// Utility-model descriptor, e.g. `uniform` or `fixed:<path>`.
    pub model: String,
    pub shared_universe: bool,
    /// Samples whose elimination left no single world; excluded from counts.
    pub no_pte: u64,
    /// counts[pair][joint]: realized joint outcomes per measurement pair.
    pub counts: [[u64; 4]; 4],
    pub chsh: ChshReport,
}

impl EnsembleReport {
    pub fn pte_found(&self) -> u64 {
        self.samples - self.no_pte
    }

    /// How often each measurement pair was picked.
    pub fn axis_counts(&self) -> [u64; 4] {
        std::array::from_fn(|pair| self.counts[pair].iter().sum())
    }

    /// Exact conditional distribution over joint outcomes given the pair;
    /// `None` when the pair never realized.
    pub fn conditional(&self, pair: usize) -> Option<[BigRational; 4]> {
        let total: u64 = self.counts[pair].iter().sum();
        if total == 0 {
            return None;
        }
        Some(std::array::from_fn(|joint| {
            BigRational::new(BigInt::from(self.counts[pair][joint]), BigInt::from(total))
        }))
    }
}

/// Computes the CHSH statistic of a report under a sign map.
pub fn chsh(report: &EnsembleReport, sign_map: SignMap) -> ChshReport {
    chsh_of_counts(&report.counts, sign_map)
}

pub(crate) fn chsh_of_counts(counts: &[[u64; 4]; 4], sign_map: SignMap) -> ChshReport {
    let correlators: [Option<BigRational>; 4] = std::array::from_fn(|pair| {
        let total: u64 = counts[pair].iter().sum();
        if total == 0 {
            return None;
        }
        let a_axis = (pair / 2) as u8;
        let b_axis = (pair % 2) as u8;
        let mut numerator = BigInt::from(0);
        for (joint, &count) in counts[pair].iter().enumerate() {
            let u = a_axis * 2 + (joint / 2) as u8;
            let v = b_axis * 2 + (joint % 2) as u8;
            numerator += BigInt::from(sign_map.sign(u) * sign_map.sign(v)) * BigInt::from(count);
        }
        Some(BigRational::new(numerator, BigInt::from(total)))
    });
    let s = match &correlators {
        [Some(ac), Some(ad), Some(bc), Some(bd)] => Some(ac + ad + bc - bd),
        _ => None,
    };
    ChshReport {
        sign_map,
        correlators,
        s,
    }
}

// ---------------------------------------------------------------------------
// utility models and ensembles

/// Where one agent's ranking comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankingSource {
    /// A fresh uniform permutation per sample.
    Uniform,
    /// The same fixed ranking every sample.
    Fixed(Vec<i64>),
}

/// Per-role ranking sources for an ensemble.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilityModel {
    pub a: RankingSource,
    pub b: RankingSource,
    pub u: RankingSource,
    /// Ignored when `shared_universe` is set.
    pub v: RankingSource,
    pub shared_universe: bool,
    /// Recorded verbatim in reports.
    pub descriptor: String,
}

impl UtilityModel {
    pub fn uniform(shared_universe: bool) -> Self {
        UtilityModel {
            a: RankingSource::Uniform,
            b: RankingSource::Uniform,
            u: RankingSource::Uniform,
            v: RankingSource::Uniform,
            shared_universe,
            descriptor: "uniform".into(),
        }
    }

    pub fn validate(&self) -> Result<(), EprError> {
        for (source, role) in [(&self.a, "a"), (&self.b, "b"), (&self.u, "u"), (&self.v, "v")] {
            if let RankingSource::Fixed(ranking) = source {
                check_ranking(ranking, role)?;
            }
        }
        Ok(())
    }
}

/// Fixed rankings as stored in an `epr-utilities` file; omitted roles stay
/// uniform.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UtilitySpec {
    pub a: Option<Vec<i64>>,
    pub b: Option<Vec<i64>>,
    pub u: Option<Vec<i64>>,
    pub v: Option<Vec<i64>>,
    pub shared_universe: bool,
}

impl UtilitySpec {
    pub fn into_model(self, descriptor: String) -> Result<UtilityModel, EprError> {
        if self.shared_universe && self.v.is_some() {
            return Err(EprError::SharedConflict);
        }
        let source = |ranking: Option<Vec<i64>>| match ranking {
            Some(r) => RankingSource::Fixed(r),
            None => RankingSource::Uniform,
        };
        let model = UtilityModel {
            a: source(self.a),
            b: source(self.b),
            u: source(self.u),
            v: source(self.v),
            shared_universe: self.shared_universe,
            descriptor,
        };
        model.validate()?;
        Ok(model)
    }
}

/// Deterministic per-sample utilities: stream `index` of the seeded
/// generator, rankings drawn in role order a, b, u, v.
pub fn draw_utilities(seed: u64, index: u64, model: &UtilityModel) -> EprUtilities {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut draw = |source: &RankingSource| match source {
        RankingSource::Fixed(ranking) => ranking.clone(),
        RankingSource::Uniform => shuffled_ranks(&mut rng),
    };
    let a = draw(&model.a);
    let b = draw(&model.b);
    let u = draw(&model.u);
    let v = if model.shared_universe { u.clone() } else { draw(&model.v) };
    EprUtilities {
        a,
        b,
        u,
        v,
        shared_universe: model.shared_universe,
    }
}

/// Unbiased Fisher-Yates over the ranks 1..=16.
fn shuffled_ranks(rng: &mut ChaCha8Rng) -> Vec<i64> {
    let mut ranks: Vec<i64> = (1..=OUTCOME_COUNT as i64).collect();
    for i in (1..ranks.len()).rev() {
        let j = uniform(rng, (i + 1) as u64) as usize;
        ranks.swap(i, j);
    }
    ranks
}

/// Rejection-sampled uniform draw in 0..bound, stable across library
/// versions because it only consumes raw 64-bit outputs.
fn uniform(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let r = rng.next_u64();
        if r < zone {
            return r % bound;
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Serial,
    Parallel,
}

#[derive(Clone, Default)]
struct Tally {
    counts: [[u64; 4]; 4],
    no_pte: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for pair in 0..4 {
            for joint in 0..4 {
                self.counts[pair][joint] += other.counts[pair][joint];
            }
        }
        self.no_pte += other.no_pte;
        self
    }
}

/// Runs `samples` independent games and aggregates the realized worlds.
/// Identical results for serial and parallel execution.
pub fn sample_ensemble(
    samples: u64,
    seed: u64,
    model: &UtilityModel,
) -> Result<EnsembleReport, EprError> {
    sample_ensemble_with(samples, seed, model, Execution::Serial, SignMap::default())
}

pub fn sample_ensemble_with(
    samples: u64,
    seed: u64,
    model: &UtilityModel,
    execution: Execution,
    sign_map: SignMap,
) -> Result<EnsembleReport, EprError> {
    if samples == 0 {
        return Err(EprError::NoSamples);
    }
    model.validate()?;

    let tally = match execution {
        Execution::Serial => (0..samples)
            .map(|index| run_sample(seed, index, model))
            .fold(Tally::default(), Tally::merge),
        Execution::Parallel => (0..samples)
            .into_par_iter()
            .map(|index| run_sample(seed, index, model))
            .reduce(Tally::default, Tally::merge),
    };

    Ok(EnsembleReport {
        samples,
        seed,
        model: model.descriptor.clone(),
        shared_universe: model.shared_universe,
        no_pte: tally.no_pte,
        chsh: chsh_of_counts(&tally.counts, sign_map),
        counts: tally.counts,
    })
}

fn run_sample(seed: u64, index: u64, model: &UtilityModel) -> Tally {
    let utilities = draw_utilities(seed, index, model);
    let spec = build_epr_game(&utilities);
    let tree = compile(&spec).expect("EPR games always compile");
    let result = solve_pte(&tree).expect("rankings are in general position");
    let mut tally = Tally::default();
    match result.status {
        PteStatus::Unique(outcome) => {
            let world = epr_outcome_of(&tree, &outcome)
                .expect("EPR outcomes decide all four events");
            tally.counts[world.pair()][world.joint()] += 1;
        }
        PteStatus::Empty | PteStatus::Multiple(_) => tally.no_pte += 1,
    }
    tally
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_game;
    use crate::spacetime::{causal_relation, validate_spec, CausalRelation};

    fn identity_utilities() -> EprUtilities {
        let ranks: Vec<i64> = (1..=16).collect();
        EprUtilities {
            a: ranks.clone(),
            b: ranks.iter().rev().copied().collect(),
            u: ranks.clone(),
            v: ranks.clone(),
            shared_universe: true,
        }
    }

    #[test]
    fn epr_game_compiles_to_6_infosets_16_leaves() {
        let spec = build_epr_game(&identity_utilities());
        assert!(validate_spec(&spec).is_valid());
        let tree = compile(&spec).unwrap();
        assert!(validate_game(&tree).is_valid());
        assert_eq!(tree.infosets().len(), 6);
        assert_eq!(tree.leaf_count(), 16);
    }

    #[test]
    fn epr_causal_structure() {
        let spec = build_epr_game(&identity_utilities());
        let coord = |id: &str| spec.event(id).unwrap().coord.clone();
        assert_eq!(causal_relation(&coord("A"), &coord("U")), CausalRelation::Timelike);
        assert_eq!(causal_relation(&coord("A"), &coord("V")), CausalRelation::Spacelike);
        assert_eq!(causal_relation(&coord("A"), &coord("B")), CausalRelation::Spacelike);
        assert_eq!(causal_relation(&coord("B"), &coord("V")), CausalRelation::Timelike);
        assert_eq!(causal_relation(&coord("B"), &coord("U")), CausalRelation::Spacelike);
        assert_eq!(causal_relation(&coord("U"), &coord("V")), CausalRelation::Spacelike);
    }

    #[test]
    fn shared_universe_duplicates_payoff_entries() {
        let spec = build_epr_game(&identity_utilities());
        for payoffs in spec.payoffs.values() {
            assert_eq!(payoffs.get(2), payoffs.get(3));
        }
    }

    #[test]
    fn ranking_validation() {
        let mut utilities = identity_utilities();
        utilities.shared_universe = false;
        assert_eq!(utilities.validate(), Ok(()));
        utilities.a[0] = 16; // duplicate rank
        assert_eq!(
            utilities.validate(),
            Err(EprError::InvalidRanking { role: "a" })
        );
    }

    #[test]
    fn ensemble_is_deterministic() {
        let model = UtilityModel::uniform(false);
        let one = sample_ensemble(1, 7, &model).unwrap();
        let two = sample_ensemble(1, 7, &model).unwrap();
        assert_eq!(one, two);
        assert_eq!(one.pte_found() + one.no_pte, 1);
    }

    #[test]
    fn uniform_draw_is_unbiased_shape() {
        // all 16 ranks present in a draw
        let utilities = draw_utilities(42, 3, &UtilityModel::uniform(false));
        assert_eq!(utilities.validate(), Ok(()));
    }

    #[test]
    fn chsh_trivial_fixtures() {
        // independent uniform outcomes: every correlator 0
        let flat = [[25u64; 4]; 4];
        let report = chsh_of_counts(&flat, SignMap::default());
        assert_eq!(report.s, Some(BigRational::from(BigInt::from(0))));

        // same-sign outcomes under every pair: S = 1+1+1-1 = 2
        let mut aligned = [[0u64; 4]; 4];
        for pair in 0..4 {
            aligned[pair][0] = 10; // both first-slot (even, even)
            aligned[pair][3] = 10; // both second-slot (odd, odd)
        }
        let report = chsh_of_counts(&aligned, SignMap::default());
        assert_eq!(report.s, Some(BigRational::from(BigInt::from(2))));

        // anticorrelated only on (b,d): the definitional maximum S = 4
        let mut pr_box = aligned;
        pr_box[3] = [0, 10, 10, 0];
        let report = chsh_of_counts(&pr_box, SignMap::default());
        assert_eq!(report.s, Some(BigRational::from(BigInt::from(4))));
    }

    #[test]
    fn unsupported_pair_leaves_s_undefined() {
        let mut counts = [[5u64; 4]; 4];
        counts[2] = [0; 4];
        let report = chsh_of_counts(&counts, SignMap::default());
        assert_eq!(report.correlators[2], None);
        assert_eq!(report.s, None);
    }

    #[test]
    fn sign_map_round_trip() {
        let map = SignMap::parse("+--+").unwrap();
        assert_eq!(map.to_string(), "+--+");
        assert_eq!(SignMap::default().to_string(), "+-+-");
        assert!(SignMap::parse("+-").is_none());
        assert!(SignMap::parse("+-+x").is_none());
    }
}
