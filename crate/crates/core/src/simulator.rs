//! Exact three-qubit simulation of the dilation circuit with synthetic
//! measurement noise and tomographic reconstruction.
//!
//! The pipeline per time point: build the circuit at `p(t)`, conjugate
//! `rho (x) |00><00|` by the total unitary, take all 63 three-qubit Pauli
//! expectations, perturb each with seeded Gaussian noise, reconstruct by
//! linear inversion plus projection onto the density-matrix cone, and trace
//! out the ancillas. Noise streams are keyed by (seed, time index, label),
//! so identical configurations reproduce byte-identical results and time
//! points stay independent.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channels::{pauli_operator, PauliMixture};
use crate::dilation::DilationCircuit;
use crate::error::{Error, Result};
use crate::qmath::{
    fidelity, nearest_density_matrix, partial_trace_ancilla, ComplexMatrix, DensityMatrix, C64,
};

/// Noise level used by the synthetic-experiment mode unless overridden.
pub const DEFAULT_NOISE_SIGMA: f64 = 0.02;
/// Default sampling window of the synthetic experiment.
pub const DEFAULT_EXPERIMENT_T_START: f64 = 0.1;
pub const DEFAULT_EXPERIMENT_T_END: f64 = 1.5;
/// Default number of sampled time points in the synthetic experiment.
pub const DEFAULT_EXPERIMENT_POINTS: usize = 15;

/// Additive Gaussian noise on each Pauli expectation value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    sigma: f64,
    seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::OutOfRange {
                name: "sigma",
                value: sigma,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(Self { sigma, seed })
    }

    pub fn noiseless(seed: u64) -> Self {
        Self { sigma: 0.0, seed }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent sub-model for one time point of a sweep.
    pub fn derive_point(&self, index: usize) -> Self {
        Self {
            sigma: self.sigma,
            seed: splitmix64(self.seed ^ splitmix64(index as u64 + 1)),
        }
    }

    fn rng_for_label(&self, label: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ fnv1a64(label.as_bytes())))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xCBF2_9CE4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

/// Pauli expectation values keyed by label strings such as "XZI".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub n_qubits: usize,
    pub expectations: BTreeMap<String, f64>,
}

impl MeasurementRecord {
    pub fn is_complete(&self) -> bool {
        pauli_labels(self.n_qubits)
            .iter()
            .all(|l| self.expectations.contains_key(l))
    }
}

/// All non-identity Pauli label strings on `n` qubits, in lexicographic
/// order of the underlying base-4 digits (I < X < Y < Z positionwise).
pub fn pauli_labels(n_qubits: usize) -> Vec<String> {
    const CHARS: [char; 4] = ['I', 'X', 'Y', 'Z'];
    let count = 4usize.pow(n_qubits as u32);
    (1..count)
        .map(|mut idx| {
            let mut chars = vec!['I'; n_qubits];
            for pos in (0..n_qubits).rev() {
                chars[pos] = CHARS[idx % 4];
                idx /= 4;
            }
            chars.into_iter().collect()
        })
        .collect()
}

/// Tensor-product operator for a Pauli label, first character acting on the
/// most significant qubit.
pub fn pauli_string_operator(label: &str) -> Result<ComplexMatrix> {
    let mut out: Option<ComplexMatrix> = None;
    for ch in label.chars() {
        let k = match ch {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            'Z' => 3,
            other => {
                return Err(Error::MissingObservable(format!(
                    "invalid Pauli character '{other}' in label {label}"
                )))
            }
        };
        let sigma = pauli_operator(k);
        out = Some(match out {
            None => sigma,
            Some(acc) => acc.tensor(&sigma),
        });
    }
    out.ok_or_else(|| Error::MissingObservable("empty Pauli label".into()))
}

/// Exact expectations `Tr(rho P)` for every non-identity Pauli string.
pub fn pauli_expectations(rho: &DensityMatrix) -> MeasurementRecord {
    let n_qubits = match rho.dim() {
        2 => 1,
        8 => 3,
        other => unreachable!("density matrices are 2- or 8-dimensional, got {other}"),
    };
    let expectations = pauli_labels(n_qubits)
        .into_iter()
        .map(|label| {
            let op = pauli_string_operator(&label).expect("generated labels are valid");
            let value = rho.matrix().trace_product(&op).re;
            (label, value)
        })
        .collect();
    MeasurementRecord {
        n_qubits,
        expectations,
    }
}

/// Perturbs each expectation with an independent Gaussian draw keyed by
/// (seed, label). `sigma = 0` returns the record unchanged.
pub fn add_noise(rec: &MeasurementRecord, nm: &NoiseModel) -> MeasurementRecord {
    if nm.sigma() == 0.0 {
        return rec.clone();
    }
    let normal = Normal::new(0.0, nm.sigma()).expect("sigma validated non-negative");
    let expectations = rec
        .expectations
        .iter()
        .map(|(label, &value)| {
            let mut rng = nm.rng_for_label(label);
            (label.clone(), value + normal.sample(&mut rng))
        })
        .collect();
    MeasurementRecord {
        n_qubits: rec.n_qubits,
        expectations,
    }
}

/// A reconstructed state, with its overlap fidelity against a reference when
/// one was supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub state: DensityMatrix,
    pub fidelity_to_target: Option<f64>,
}

/// Reconstructs a state from a complete record: linear inversion
/// `rho = (I + sum_P <P> P) / 2^n` followed by projection onto the closest
/// density matrix.
pub fn tomo_reconstruct(
    rec: &MeasurementRecord,
    target: Option<&DensityMatrix>,
) -> Result<TomographyResult> {
    let dim = match rec.n_qubits {
        1 => 2,
        3 => 8,
        other => return Err(Error::UnsupportedDimension(1 << other)),
    };
    let mut linear = ComplexMatrix::identity(dim);
    for label in pauli_labels(rec.n_qubits) {
        let value = *rec
            .expectations
            .get(&label)
            .ok_or_else(|| Error::MissingObservable(label.clone()))?;
        let op = pauli_string_operator(&label)?;
        linear = &linear + &op.scale(C64::new(value, 0.0));
    }
    let state = nearest_density_matrix(&linear.scale(C64::new(1.0 / dim as f64, 0.0)))?;
    let fidelity_to_target = match target {
        Some(t) => Some(fidelity(state.matrix(), t.matrix())?),
        None => None,
    };
    Ok(TomographyResult {
        state,
        fidelity_to_target,
    })
}

/// Conjugates `rho_s (x) |00><00|` by the circuit's total unitary, returning
/// the full three-qubit state.
pub fn evolve_dilation(circ: &DilationCircuit, rho_s: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho_s.dim(),
        });
    }
    let mut anc = ComplexMatrix::zeros(4, 4);
    anc.set(0, 0, C64::ONE);
    let joint = rho_s.matrix().tensor(&anc);
    let t = circ.total();
    let evolved = t.matmul(&joint).matmul(&t.adjoint());
    DensityMatrix::new(evolved.symmetrize())
}

/// Runs the dilation and traces out the ancillas; equals the analytic channel
/// action on `rho_s`.
pub fn run_dilation(circ: &DilationCircuit, rho_s: &DensityMatrix) -> Result<DensityMatrix> {
    partial_trace_ancilla(&evolve_dilation(circ, rho_s)?)
}

/// One reconstructed time point of the synthetic experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPoint {
    pub t: f64,
    /// System-qubit state traced out of the reconstructed three-qubit state.
    pub system_state: DensityMatrix,
    /// System-qubit state reconstructed from the same record's system
    /// observables (XII, YII, ZII) alone. The three-qubit state is pure, so
    /// projecting its noisy reconstruction onto the density cone biases the
    /// traced populations; this route stays unbiased and is the one used for
    /// parameter estimation.
    pub system_tomogram: DensityMatrix,
    /// Overlap fidelity of the three-qubit reconstruction against the exact
    /// evolved state.
    pub full_state_fidelity: f64,
}

/// Restricts a three-qubit record to the system-qubit observables.
fn system_record(rec: &MeasurementRecord) -> Result<MeasurementRecord> {
    let mut expectations = BTreeMap::new();
    for (single, triple) in [("X", "XII"), ("Y", "YII"), ("Z", "ZII")] {
        let value = *rec
            .expectations
            .get(triple)
            .ok_or_else(|| Error::MissingObservable(triple.into()))?;
        expectations.insert(single.to_string(), value);
    }
    Ok(MeasurementRecord {
        n_qubits: 1,
        expectations,
    })
}

/// Simulates the full measurement pipeline over a time grid.
pub fn synthetic_experiment(
    m: &PauliMixture,
    grid: &[f64],
    nm: &NoiseModel,
    rho0: &DensityMatrix,
) -> Result<Vec<ExperimentPoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
    }
    grid.iter()
        .enumerate()
        .map(|(index, &t)| {
            let p = m.decoherence().p(t)?;
            let circ = DilationCircuit::for_mixture(m, p)?;
            let exact = evolve_dilation(&circ, rho0)?;
            let record = pauli_expectations(&exact);
            let noisy = add_noise(&record, &nm.derive_point(index));
            let tomo = tomo_reconstruct(&noisy, Some(&exact))?;
            let system_state = partial_trace_ancilla(&tomo.state)?;
            let system_tomogram = tomo_reconstruct(&system_record(&noisy)?, None)?.state;
            Ok(ExperimentPoint {
                t,
                system_state,
                system_tomogram,
                full_state_fidelity: tomo
                    .fidelity_to_target
                    .expect("target supplied above"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::Preset;
    use crate::divisibility::linspace;
    use crate::qmath::BlochVector;

    const P_C2_T05: f64 = 0.316_060_279_414_278_83;

    #[test]
    fn labels_have_expected_counts() {
        assert_eq!(pauli_labels(1), vec!["X", "Y", "Z"]);
        let labels = pauli_labels(3);
        assert_eq!(labels.len(), 63);
        assert!(labels.contains(&"XZI".to_string()));
        assert!(!labels.contains(&"III".to_string()));
    }

    #[test]
    fn run_dilation_identity_at_p0() {
        let m = Preset::Fig2.mixture();
        let circ = DilationCircuit::for_mixture(&m, 0.0).unwrap();
        let rho = DensityMatrix::from_bloch(&BlochVector::new(0.3, 0.1, -0.4).unwrap()).unwrap();
        let out = run_dilation(&circ, &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-13);
    }

    #[test]
    fn run_dilation_matches_analytic_mixture() {
        let m = Preset::Fig2.mixture();
        let p = m.decoherence().p(0.5).unwrap();
        let circ = DilationCircuit::for_mixture(&m, p).unwrap();
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let out = run_dilation(&circ, &rho).unwrap();
        assert!((out.matrix().get(0, 0).re - (1.0 - 0.5 * P_C2_T05)).abs() < 1e-13);
        assert!((out.matrix().get(1, 1).re - 0.5 * P_C2_T05).abs() < 1e-13);
    }

    #[test]
    fn run_dilation_fixes_maximally_mixed() {
        let m = Preset::Fig4.mixture();
        let circ = DilationCircuit::for_mixture(&m, 0.3).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let out = run_dilation(&circ, &mixed).unwrap();
        assert!(out.matrix().max_abs_diff(mixed.matrix()) < 1e-13);
    }

    #[test]
    fn expectations_of_simple_states() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let rec = pauli_expectations(&mixed);
        for v in rec.expectations.values() {
            assert!(v.abs() < 1e-15);
        }

        let ground = DensityMatrix::basis_state(2, 0).unwrap();
        let rec = pauli_expectations(&ground);
        assert!((rec.expectations["Z"] - 1.0).abs() < 1e-15);
        assert!(rec.expectations["X"].abs() < 1e-15);
        assert!(rec.expectations["Y"].abs() < 1e-15);
    }

    #[test]
    fn expectations_of_three_qubit_ground_state() {
        let rho = DensityMatrix::basis_state(8, 0).unwrap();
        let rec = pauli_expectations(&rho);
        for (label, &value) in &rec.expectations {
            let z_only = label.chars().all(|c| c == 'I' || c == 'Z');
            let want = if z_only { 1.0 } else { 0.0 };
            assert!((value - want).abs() < 1e-15, "{label}: {value}");
        }
    }

    #[test]
    fn zero_sigma_noise_is_identity() {
        let rho = DensityMatrix::basis_state(8, 0).unwrap();
        let rec = pauli_expectations(&rho);
        let noisy = add_noise(&rec, &NoiseModel::noiseless(17));
        assert_eq!(rec, noisy);
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let rho = DensityMatrix::basis_state(8, 0).unwrap();
        let rec = pauli_expectations(&rho);
        let nm = NoiseModel::new(0.05, 99).unwrap();
        let a = add_noise(&rec, &nm);
        let b = add_noise(&rec, &nm);
        assert_eq!(a, b);
        let other = add_noise(&rec, &NoiseModel::new(0.05, 100).unwrap());
        assert_ne!(a, other);
    }

    #[test]
    fn noise_sample_std_matches_sigma() {
        // ~10^4 draws across many derived seeds
        let rho = DensityMatrix::maximally_mixed(8).unwrap();
        let clean = pauli_expectations(&rho);
        let base = NoiseModel::new(0.01, 4242).unwrap();
        let mut deltas = Vec::with_capacity(63 * 160);
        for i in 0..160 {
            let noisy = add_noise(&clean, &base.derive_point(i));
            for (label, &v) in &noisy.expectations {
                deltas.push(v - clean.expectations[label]);
            }
        }
        let n = deltas.len() as f64;
        let mean: f64 = deltas.iter().sum::<f64>() / n;
        let var: f64 = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let std = var.sqrt();
        assert!((std - 0.01).abs() / 0.01 < 0.05, "sample std {std}");
    }

    #[test]
    fn tomography_round_trip_exact() {
        let ground = DensityMatrix::basis_state(2, 0).unwrap();
        let rec = pauli_expectations(&ground);
        let out = tomo_reconstruct(&rec, Some(&ground)).unwrap();
        assert!(out.state.matrix().max_abs_diff(ground.matrix()) < 1e-12);
        assert!(out.fidelity_to_target.unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn tomography_round_trip_random_pure_state() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let ket: Vec<C64> = (0..8)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let rho = DensityMatrix::pure(&ket).unwrap();
        let rec = pauli_expectations(&rho);
        let out = tomo_reconstruct(&rec, Some(&rho)).unwrap();
        assert!(out.fidelity_to_target.unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn tomography_projects_noisy_records() {
        let rho = DensityMatrix::basis_state(8, 0).unwrap();
        let rec = add_noise(
            &pauli_expectations(&rho),
            &NoiseModel::new(0.05, 3).unwrap(),
        );
        let out = tomo_reconstruct(&rec, None).unwrap();
        let m = out.state.matrix();
        assert!((m.trace().re - 1.0).abs() < 1e-9);
        assert!(crate::qmath::eigh(m).values[0] > -1e-9);
    }

    #[test]
    fn tomography_rejects_incomplete_records() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let mut rec = pauli_expectations(&rho);
        rec.expectations.remove("Y");
        assert!(matches!(
            tomo_reconstruct(&rec, None),
            Err(Error::MissingObservable(_))
        ));
    }

    #[test]
    fn noiseless_experiment_matches_analytic_channel() {
        let rho0 = DensityMatrix::basis_state(2, 0).unwrap();
        let grid = linspace(0.1, 1.5, 6).unwrap();
        for preset in [Preset::Fig3, Preset::Fig6] {
            let m = preset.mixture();
            let points = synthetic_experiment(&m, &grid, &NoiseModel::noiseless(1), &rho0).unwrap();
            for pt in &points {
                let want = m.apply(&rho0, pt.t).unwrap();
                assert!(
                    pt.system_state.matrix().max_abs_diff(want.matrix()) < 1e-9,
                    "{} t={}",
                    preset.name(),
                    pt.t
                );
                assert!(pt.system_tomogram.matrix().max_abs_diff(want.matrix()) < 1e-9);
                assert!(pt.full_state_fidelity > 1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn experiment_fixes_maximally_mixed_input() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let grid = linspace(0.1, 1.0, 4).unwrap();
        let m = Preset::Fig4.mixture();
        let points = synthetic_experiment(&m, &grid, &NoiseModel::noiseless(1), &mixed).unwrap();
        for pt in &points {
            assert!(pt.system_state.matrix().max_abs_diff(mixed.matrix()) < 1e-9);
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let rho0 = DensityMatrix::basis_state(2, 0).unwrap();
        let grid = linspace(0.1, 1.5, 5).unwrap();
        let m = Preset::Fig6.mixture();
        let nm = NoiseModel::new(0.02, 7).unwrap();
        let a = synthetic_experiment(&m, &grid, &nm, &rho0).unwrap();
        let b = synthetic_experiment(&m, &grid, &nm, &rho0).unwrap();
        assert_eq!(a, b);
    }
}
