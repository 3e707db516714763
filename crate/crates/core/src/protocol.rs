//! Random dihedral sequences, inversion gates and survival probabilities.
//!
//! A standard sequence applies `m` uniformly random elements of `D_j`
//! followed by the inversion gate `X^b1 Z^b2 (g_m ... g_1)^-1`. In
//! interleaved mode every random element is followed by the half-step
//! rotation `R_{2j}(1)` (the T gate for `j = 4`); the length must then be
//! even so that the ideal composite, and hence the inversion gate, stays in
//! `D_j`.
//!
//! Every noisy gate, including the inversion gate, is resolved through the
//! plan's [`GateNoiseMap`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dihedral::GroupElement;
use crate::error::{Error, Result};
use crate::estimation::dataset::{DatasetMeta, DecayDataset, LengthRow, SettingEstimate};
use crate::liouville::{expectation, PauliVector, Superoperator};
use crate::noise::{GateNoiseMap, GateTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Standard,
    Interleaved,
}

/// Inversion-gate toggle `(b1, b2)`: append `X^b1 Z^b2` to the ideal sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Setting {
    pub b1: bool,
    pub b2: bool,
}

impl Setting {
    pub const fn new(b1: bool, b2: bool) -> Self {
        Setting { b1, b2 }
    }

    /// Settings measured per length, sorted by `(b1, b2)`.
    pub fn all(toggle_z: bool) -> Vec<Setting> {
        if toggle_z {
            vec![
                Setting::new(false, false),
                Setting::new(false, true),
                Setting::new(true, false),
                Setting::new(true, true),
            ]
        } else {
            vec![Setting::new(false, false), Setting::new(true, false)]
        }
    }

    fn code(&self) -> u64 {
        2 * self.b1 as u64 + self.b2 as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    /// Group parameter `j` of the benchmarked group `D_j`.
    pub order: u32,
    pub mode: Mode,
    pub lengths: Vec<usize>,
    pub sequences_per_length: usize,
    /// Shots per sequence; zero means exact expectation values.
    pub shots: u64,
    pub prep: PauliVector,
    pub measurement: PauliVector,
    pub noise: GateNoiseMap,
    pub seed: u64,
    /// Whether the `b2 = 1` settings are run (requires `Z` in `D_j`, i.e. even `j`).
    pub toggle_z: bool,
}

impl ExperimentPlan {
    /// Noiseless plan with `rho = E = |0><0|` and every setting available for `j`.
    pub fn new(order: u32, mode: Mode, lengths: Vec<usize>, sequences_per_length: usize) -> Self {
        ExperimentPlan {
            order,
            mode,
            lengths,
            sequences_per_length,
            shots: 0,
            prep: PauliVector::zero(),
            measurement: PauliVector::zero(),
            noise: GateNoiseMap::default(),
            seed: 0,
            toggle_z: order.is_multiple_of(2),
        }
    }

    pub fn settings(&self) -> Vec<Setting> {
        Setting::all(self.toggle_z)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::config("group.j must be positive"));
        }
        if self.toggle_z && !self.order.is_multiple_of(2) {
            return Err(Error::config(format!(
                "b2 toggling needs the Z gate, which is not in D_{} for odd j",
                self.order
            )));
        }
        if self.lengths.is_empty() {
            return Err(Error::config("at least one sequence length is required"));
        }
        if self.lengths.contains(&0) {
            return Err(Error::config("sequence lengths must be >= 1"));
        }
        if self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(
                "sequence lengths must be strictly increasing",
            ));
        }
        if self.mode == Mode::Interleaved && self.lengths.iter().any(|m| m % 2 != 0) {
            return Err(Error::config(
                "interleaved mode requires even sequence lengths",
            ));
        }
        if self.sequences_per_length == 0 {
            return Err(Error::config("sequences_per_length must be >= 1"));
        }
        if !self.prep.is_state(1e-9) {
            return Err(Error::unphysical(format!(
                "preparation {:?} is not a density operator",
                self.prep.0.as_slice()
            )));
        }
        if !self.measurement.is_effect(1e-9) {
            return Err(Error::unphysical(format!(
                "measurement {:?} is not a POVM effect",
                self.measurement.0.as_slice()
            )));
        }
        self.noise.validate(self.order)?;
        Ok(())
    }

    /// The standard run over `D_j` that accompanies an interleaved run.
    ///
    /// Same noise on the group elements, no interleaved gate, independent seed.
    pub fn reference_plan(&self) -> ExperimentPlan {
        ExperimentPlan {
            mode: Mode::Standard,
            noise: GateNoiseMap {
                generator_noise: None,
                ..self.noise.clone()
            },
            seed: splitmix64(self.seed ^ 0x5245_4645_5245_4e43),
            ..self.clone()
        }
    }
}

/// Precomputed noisy superoperators for one plan.
#[derive(Debug, Clone)]
pub struct GateTable {
    order: u32,
    steps: Vec<Superoperator>,
    inversions: Vec<Superoperator>,
}

impl GateTable {
    pub fn new(plan: &ExperimentPlan) -> Result<Self> {
        let order = plan.order;
        let mut steps = Vec::with_capacity(2 * order as usize);
        let mut inversions = Vec::with_capacity(2 * order as usize);
        for g in GroupElement::elements(order) {
            let element = match plan.mode {
                Mode::Standard => plan.noise.resolve(GateTag::Element(g))?,
                Mode::Interleaved => plan.noise.resolve(GateTag::Native(g))?,
            };
            let step = match plan.mode {
                Mode::Standard => element,
                Mode::Interleaved => plan.noise.resolve(GateTag::Interleaved(g))?,
            };
            steps.push(step);
            inversions.push(element);
        }
        Ok(GateTable {
            order,
            steps,
            inversions,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn step(&self, g: &GroupElement) -> &Superoperator {
        debug_assert_eq!(g.order(), self.order);
        &self.steps[g.index()]
    }

    pub fn inversion(&self, g: &GroupElement) -> &Superoperator {
        debug_assert_eq!(g.order(), self.order);
        &self.inversions[g.index()]
    }
}

/// One random sequence with its inversion gate.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRecord {
    pub order: u32,
    pub mode: Mode,
    /// Rotation indices `z_t` in `Z_j`.
    pub z: Vec<u32>,
    /// Flip bits `x_t`.
    pub x: Vec<bool>,
    pub setting: Setting,
    pub inversion: GroupElement,
}

impl SequenceRecord {
    /// Record for explicit draws; computes the inversion gate.
    pub fn from_draws(
        order: u32,
        mode: Mode,
        z: Vec<u32>,
        x: Vec<bool>,
        setting: Setting,
    ) -> Result<Self> {
        if z.len() != x.len() {
            return Err(Error::invalid("z and x strings differ in length"));
        }
        if z.iter().any(|&zt| zt >= order) {
            return Err(Error::invalid(format!("rotation index outside Z_{order}")));
        }
        let elements = draws_to_elements(order, &z, &x);
        let inversion = inversion_gate(order, mode, &elements, setting)?;
        Ok(SequenceRecord {
            order,
            mode,
            z,
            x,
            setting,
            inversion,
        })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        draws_to_elements(self.order, &self.z, &self.x)
    }

    /// Ideal superoperator of the whole sequence including the inversion gate.
    pub fn ideal_superop(&self) -> Superoperator {
        let half_step = GroupElement::generator(2 * self.order).to_superop();
        let body = self
            .elements()
            .iter()
            .fold(Superoperator::identity(), |acc, g| {
                let step = match self.mode {
                    Mode::Standard => g.to_superop(),
                    Mode::Interleaved => half_step * g.to_superop(),
                };
                step * acc
            });
        self.inversion.to_superop() * body
    }
}

fn draws_to_elements(order: u32, z: &[u32], x: &[bool]) -> Vec<GroupElement> {
    z.iter()
        .zip(x)
        .map(|(&zt, &xt)| GroupElement::new(order, zt as i64, xt).expect("order checked"))
        .collect()
}

/// `X^b1 Z^b2` as an element of `D_j`.
pub fn target_element(order: u32, setting: Setting) -> Result<GroupElement> {
    let mut target = GroupElement::identity(order);
    if setting.b2 {
        let z = GroupElement::z_gate(order).ok_or_else(|| {
            Error::config(format!("b2 = 1 requires even j; Z is not in D_{order}"))
        })?;
        target = z;
    }
    if setting.b1 {
        target = GroupElement::x_gate(order).multiply(&target)?;
    }
    Ok(target)
}

/// Element of `D_j` that maps the ideal composite of `elements` onto `X^b1 Z^b2`.
pub fn inversion_gate(
    order: u32,
    mode: Mode,
    elements: &[GroupElement],
    setting: Setting,
) -> Result<GroupElement> {
    let target = target_element(order, setting)?;
    let composite = match mode {
        Mode::Standard => elements
            .iter()
            .try_fold(GroupElement::identity(order), |acc, g| g.multiply(&acc))?,
        Mode::Interleaved => {
            if !elements.len().is_multiple_of(2) {
                return Err(Error::config("interleaved sequences must have even length"));
            }
            let half_step = GroupElement::generator(2 * order);
            let big = elements
                .iter()
                .try_fold(GroupElement::identity(2 * order), |acc, g| {
                    half_step.multiply(&g.embed(2))?.multiply(&acc)
                })?;
            big.restrict(2)
                .expect("even number of half steps lands in the subgroup")
        }
    };
    target.multiply(&composite.inverse())
}

fn sample_draws<R: Rng + ?Sized>(order: u32, m: usize, rng: &mut R) -> (Vec<u32>, Vec<bool>) {
    let mut z = Vec::with_capacity(m);
    let mut x = Vec::with_capacity(m);
    for _ in 0..m {
        z.push(rng.random_range(0..order));
        x.push(rng.random_bool(0.5));
    }
    (z, x)
}

/// Draw `z_t` uniformly from `Z_j` and `x_t` uniformly from `Z_2`.
pub fn sample_sequence<R: Rng + ?Sized>(
    plan: &ExperimentPlan,
    m: usize,
    setting: Setting,
    rng: &mut R,
) -> Result<SequenceRecord> {
    if plan.mode == Mode::Interleaved && !m.is_multiple_of(2) {
        return Err(Error::config("interleaved sequences must have even length"));
    }
    if setting.b2 && !plan.order.is_multiple_of(2) {
        return Err(Error::config(format!(
            "b2 = 1 requires even j; Z is not in D_{}",
            plan.order
        )));
    }
    let (z, x) = sample_draws(plan.order, m, rng);
    SequenceRecord::from_draws(plan.order, plan.mode, z, x, setting)
}

/// State just before the inversion gate.
fn propagate(table: &GateTable, prep: &PauliVector, elements: &[GroupElement]) -> PauliVector {
    elements.iter().fold(*prep, |s, g| table.step(g).apply(&s))
}

/// Exact survival probability using a prebuilt gate table.
pub fn survival_with_table(
    table: &GateTable,
    plan: &ExperimentPlan,
    record: &SequenceRecord,
) -> Result<f64> {
    if table.order != record.order {
        return Err(Error::invalid("gate table does not match the sequence"));
    }
    let state = propagate(table, &plan.prep, &record.elements());
    let out = table.inversion(&record.inversion).apply(&state);
    expectation(&plan.measurement, &out)
}

/// Exact survival probability `Tr(E C(rho))` of one sequence under the plan's noise.
pub fn survival_exact(record: &SequenceRecord, plan: &ExperimentPlan) -> Result<f64> {
    if record.order != plan.order || record.mode != plan.mode {
        return Err(Error::invalid("sequence record does not match the plan"));
    }
    let table = GateTable::new(plan)?;
    survival_with_table(&table, plan, record)
}

fn sample_binomial<R: Rng + ?Sized>(probability: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if !(0.0..=1.0).contains(&probability) {
        return Err(Error::unphysical(format!(
            "survival probability {probability} outside [0, 1]"
        )));
    }
    if shots == 0 {
        return Err(Error::invalid("shots must be >= 1"));
    }
    let dist = Binomial::new(shots, probability)
        .map_err(|e| Error::unphysical(format!("binomial sampling: {e}")))?;
    Ok(dist.sample(rng) as f64 / shots as f64)
}

/// Empirical frequency of `+1` over `shots` measurements of one sequence.
pub fn survival_sampled<R: Rng + ?Sized>(
    record: &SequenceRecord,
    plan: &ExperimentPlan,
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    let p = survival_exact(record, plan)?;
    sample_binomial(p, shots, rng)
}

pub fn splitmix64(mut state: u64) -> u64 {
    state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sequence `index` at length `m`.
pub fn sequence_seed(master: u64, m: usize, index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ m as u64) ^ index as u64)
}

/// Survival estimates of one random sequence for each requested setting.
///
/// The `(z, x)` draws are shared by every setting; shot noise for each
/// setting comes from its own stream so that single-setting and
/// all-setting evaluations agree.
fn evaluate_sequence(
    table: &GateTable,
    plan: &ExperimentPlan,
    m: usize,
    index: usize,
    settings: &[Setting],
) -> Result<Vec<f64>> {
    let seed = sequence_seed(plan.seed, m, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (z, x) = sample_draws(plan.order, m, &mut rng);
    let elements = draws_to_elements(plan.order, &z, &x);
    let state = propagate(table, &plan.prep, &elements);
    settings
        .iter()
        .map(|setting| {
            let inv = inversion_gate(plan.order, plan.mode, &elements, *setting)?;
            let out = table.inversion(&inv).apply(&state);
            let p = expectation(&plan.measurement, &out)?;
            if plan.shots == 0 {
                Ok(p)
            } else {
                let mut shot_rng =
                    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (1 + setting.code())));
                sample_binomial(p, plan.shots, &mut shot_rng)
            }
        })
        .collect()
}

fn evaluate_length(
    table: &GateTable,
    plan: &ExperimentPlan,
    m: usize,
    settings: &[Setting],
) -> Result<Vec<Vec<f64>>> {
    // sequences are independent; collect keeps index order so the
    // reduction below is identical for serial and parallel execution
    (0..plan.sequences_per_length)
        .into_par_iter()
        .map(|i| evaluate_sequence(table, plan, m, i, settings))
        .collect()
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let values: Vec<f64> = values.into_iter().collect();
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// `Pr(m, b1, b2)` averaged over `k` random sequences, with its standard error.
pub fn estimate_pr(plan: &ExperimentPlan, m: usize, setting: Setting) -> Result<(f64, f64)> {
    plan.validate()?;
    if setting.b2 && !plan.toggle_z {
        return Err(Error::config("plan does not run b2 = 1 settings"));
    }
    if plan.mode == Mode::Interleaved && !m.is_multiple_of(2) {
        return Err(Error::config("interleaved sequences must have even length"));
    }
    let table = GateTable::new(plan)?;
    let samples = evaluate_length(&table, plan, m, &[setting])?;
    Ok(mean_and_stderr(samples.iter().map(|s| s[0])))
}

/// Survival probabilities for every length and setting of the plan.
pub fn decay_dataset(plan: &ExperimentPlan) -> Result<DecayDataset> {
    plan.validate()?;
    let table = GateTable::new(plan)?;
    let settings = plan.settings();
    let mut rows = Vec::with_capacity(plan.lengths.len());
    for &m in &plan.lengths {
        let samples = evaluate_length(&table, plan, m, &settings)?;
        let estimates = settings
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let (mean, stderr) = mean_and_stderr(samples.iter().map(|row| row[i]));
                SettingEstimate {
                    setting: *s,
                    mean,
                    stderr,
                }
            })
            .collect();
        rows.push(LengthRow {
            m,
            estimates,
            samples: Some(samples),
        });
    }
    Ok(DecayDataset {
        meta: DatasetMeta {
            order: Some(plan.order),
            mode: Some(plan.mode),
            sequences_per_length: plan.sequences_per_length,
            shots: plan.shots,
            seed: Some(plan.seed),
        },
        rows,
    })
}

/// Constants of the closed-form survival probability
/// `Pr(m, b1, b2) = (-1)^b1 A p0^m + ((-1)^(b1+b2) B1 + (-1)^b2 B2) p1^m + C`
/// for gate-independent noise `error`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpamConstants {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
}

impl SpamConstants {
    pub fn new(prep: &PauliVector, measurement: &PauliVector, error: &Superoperator) -> Self {
        // Tr(E error(P_k)) = sum_j e_j M_jk
        let image = |k: usize| -> f64 {
            (0..4)
                .map(|j| measurement.component(j) * error.get(j, k))
                .sum()
        };
        SpamConstants {
            a: 0.5 * image(3) * prep.component(3),
            b1: 0.5 * image(2) * prep.component(2),
            b2: 0.5 * image(1) * prep.component(1),
            c: 0.5 * image(0) * prep.identity_part(),
        }
    }

    pub fn survival(&self, m: usize, p0: f64, p1: f64, setting: Setting) -> f64 {
        let s1 = if setting.b1 { -1.0 } else { 1.0 };
        let s2 = if setting.b2 { -1.0 } else { 1.0 };
        s1 * self.a * p0.powi(m as i32)
            + (s1 * s2 * self.b1 + s2 * self.b2) * p1.powi(m as i32)
            + self.c
    }
}

/// Checks `inversion * composite == X^b1 Z^b2` at the Liouville level.
pub fn check_inversion(record: &SequenceRecord) -> Result<()> {
    let target = target_element(record.order, record.setting)?.to_superop();
    if record.ideal_superop().approx_eq(&target, 1e-9) {
        Ok(())
    } else {
        Err(Error::invalid(
            "inversion gate does not invert the sequence",
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseSpec;
    use approx::assert_abs_diff_eq;

    const S00: Setting = Setting::new(false, false);
    const S10: Setting = Setting::new(true, false);

    fn plan8() -> ExperimentPlan {
        ExperimentPlan::new(8, Mode::Standard, vec![1, 2, 4], 20)
    }

    #[test]
    fn identity_draw_has_identity_inversion() {
        let r = SequenceRecord::from_draws(8, Mode::Standard, vec![0], vec![false], S00).unwrap();
        assert_eq!(r.inversion, GroupElement::identity(8));
    }

    #[test]
    fn explicit_two_step_inversion() {
        let r = SequenceRecord::from_draws(8, Mode::Standard, vec![3, 5], vec![true, false], S00)
            .unwrap();
        let g1 = GroupElement::new(8, 3, true).unwrap();
        let g2 = GroupElement::new(8, 5, false).unwrap();
        let prod = r.inversion.to_superop() * g2.to_superop() * g1.to_superop();
        assert!(prod.approx_eq(&Superoperator::identity(), 1e-12));
        check_inversion(&r).unwrap();
    }

    #[test]
    fn interleaved_inversion_lies_in_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let plan = ExperimentPlan::new(4, Mode::Interleaved, vec![2], 1);
        for setting in Setting::all(true) {
            for _ in 0..50 {
                let r = sample_sequence(&plan, 2, setting, &mut rng).unwrap();
                assert_eq!(r.inversion.order(), 4);
                check_inversion(&r).unwrap();
            }
        }
        assert!(sample_sequence(&plan, 3, S00, &mut rng).is_err());
    }

    #[test]
    fn odd_order_rejects_b2() {
        let plan = ExperimentPlan::new(5, Mode::Standard, vec![1], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_sequence(&plan, 1, Setting::new(false, true), &mut rng),
            Err(Error::Config(_))
        ));
        let mut bad = plan.clone();
        bad.toggle_z = true;
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn noiseless_survival() {
        let plan = plan8();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [1, 5, 17] {
            let r = sample_sequence(&plan, m, S00, &mut rng).unwrap();
            assert_abs_diff_eq!(survival_exact(&r, &plan).unwrap(), 1.0, epsilon = 1e-12);
            let r = sample_sequence(&plan, m, S10, &mut rng).unwrap();
            assert_abs_diff_eq!(survival_exact(&r, &plan).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn depolarizing_survival_closed_form() {
        let p = 0.97;
        let mut plan = plan8();
        plan.noise = GateNoiseMap::uniform(NoiseSpec::Depolarizing { p });
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [1, 3, 10] {
            let r = sample_sequence(&plan, m, S00, &mut rng).unwrap();
            let expected = (1.0 + p.powi(m as i32 + 1)) / 2.0;
            assert_abs_diff_eq!(
                survival_exact(&r, &plan).unwrap(),
                expected,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn sampled_survival_edges() {
        let plan = plan8();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = sample_sequence(&plan, 4, S00, &mut rng).unwrap();
        assert_eq!(survival_sampled(&r, &plan, 17, &mut rng).unwrap(), 1.0);
        let r = sample_sequence(&plan, 4, S10, &mut rng).unwrap();
        assert_eq!(survival_sampled(&r, &plan, 17, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn binomial_shot_noise_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let est = sample_binomial(0.75, 1_000_000, &mut rng).unwrap();
        assert!((est - 0.75).abs() < 0.0013, "{est}");
        assert!(sample_binomial(1.2, 10, &mut rng).is_err());
    }

    #[test]
    fn identity_noise_estimate() {
        let plan = plan8();
        let (mean, err) = estimate_pr(&plan, 4, S00).unwrap();
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(err, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn estimate_matches_dataset_cell() {
        let mut plan = plan8();
        plan.shots = 50;
        plan.seed = 1234;
        plan.noise = GateNoiseMap::uniform(NoiseSpec::Depolarizing { p: 0.9 });
        let ds = decay_dataset(&plan).unwrap();
        let (mean, err) = estimate_pr(&plan, 2, Setting::new(true, true)).unwrap();
        let cell = ds.rows[1].estimate(Setting::new(true, true)).unwrap();
        assert_eq!((mean, err), (cell.mean, cell.stderr));
    }

    #[test]
    fn spam_constants_sign_pattern() {
        let consts = SpamConstants {
            a: 1.0,
            b1: 10.0,
            b2: 100.0,
            c: 0.0,
        };
        let v = |b1, b2| consts.survival(0, 1.0, 1.0, Setting::new(b1, b2));
        assert_eq!(v(false, false), 111.0);
        assert_eq!(v(false, true), 1.0 - 10.0 - 100.0);
        assert_eq!(v(true, false), -1.0 - 10.0 + 100.0);
        assert_eq!(v(true, true), -1.0 + 10.0 - 100.0);
    }

    #[test]
    fn plan_validation() {
        let mut plan = ExperimentPlan::new(4, Mode::Interleaved, vec![2, 3], 1);
        assert!(plan.validate().is_err());
        plan.lengths = vec![4, 2];
        assert!(plan.validate().is_err());
        plan.lengths = vec![2, 4];
        plan.validate().unwrap();
        plan.prep = PauliVector::from_bloch([1.0, 1.0, 0.0]);
        assert!(matches!(plan.validate(), Err(Error::Unphysical(_))));
    }

    #[test]
    fn seeds_are_distinct() {
        let a = sequence_seed(1, 2, 3);
        assert_ne!(a, sequence_seed(1, 3, 2));
        assert_ne!(a, sequence_seed(2, 2, 3));
        assert_eq!(a, sequence_seed(1, 2, 3));
    }
}
