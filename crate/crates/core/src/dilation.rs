//! Three-qubit dilation of the mixture channel.
//!
//! The channel on the system qubit is realized unitarily on system plus two
//! ancillas: prepare the ancillas with `V`, apply the controlled-Pauli `U`,
//! apply `W` (the identity here) on the ancillas, and trace the ancillas out.
//! The first column of `V` carries the square roots of the Kraus weights, so
//! with `W = I` the Kraus operators are `E_k = V[k,0] * sigma_k`.

use crate::channels::{pauli_operator, KrausSet, MixingWeights, PauliMixture};
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, C64};

/// The 4x4 unitary preparing the ancilla pair, together with the parameters
/// it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaUnitary {
    matrix: ComplexMatrix,
    kind: MixKind,
    p: f64,
}

/// Which family of mixtures an ancilla unitary realizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixKind {
    /// Weights `(0, 1 - a, a)`.
    TwoMix { a: f64 },
    /// All three weights strictly positive (x2 > 0 required by the
    /// parametrization).
    ThreeMix { weights: MixingWeights },
}

impl AncillaUnitary {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> MixKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `V[k, 0]`, the amplitude routed to ancilla state |k>.
    pub fn first_column(&self) -> [C64; 4] {
        [
            self.matrix.get(0, 0),
            self.matrix.get(1, 0),
            self.matrix.get(2, 0),
            self.matrix.get(3, 0),
        ]
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            min: 0.0,
            max: 0.5,
        });
    }
    Ok(())
}

/// Ancilla unitary for the two-way mixture `a L3 + (1 - a) L2`:
///
/// ```text
/// | sqrt(1-p)        sqrt(p)            0   0          |
/// | 0                0                  1   0          |
/// | sqrt(p(1-a))    -sqrt((1-a)(1-p))   0   sqrt(a)    |
/// | sqrt(ap)        -sqrt(a(1-p))       0  -sqrt(1-a)  |
/// ```
pub fn build_v_two_mix(a: f64, p: f64) -> Result<AncillaUnitary> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            min: 0.0,
            max: 1.0,
        });
    }
    check_p(p)?;
    let r = |v: f64| C64::new(v, 0.0);
    let q = 1.0 - p;
    let matrix = ComplexMatrix::new(
        4,
        4,
        vec![
            r(q.sqrt()),
            r(p.sqrt()),
            r(0.0),
            r(0.0),
            //
            r(0.0),
            r(0.0),
            r(1.0),
            r(0.0),
            //
            r((p * (1.0 - a)).sqrt()),
            r(-((1.0 - a) * q).sqrt()),
            r(0.0),
            r(a.sqrt()),
            //
            r((a * p).sqrt()),
            r(-(a * q).sqrt()),
            r(0.0),
            r(-(1.0 - a).sqrt()),
        ],
    );
    Ok(AncillaUnitary {
        matrix,
        kind: MixKind::TwoMix { a },
        p,
    })
}

/// Ancilla unitary for a three-way mixture with first column
/// `(sqrt(1-p), sqrt(x1 p), sqrt(x2 p), sqrt(x3 p))`:
///
/// ```text
/// | sqrt(1-p)      sqrt(p)            0                     0                 |
/// | sqrt(x1 p)    -sqrt(x1 (1-p))     sqrt(1-x1)            0                 |
/// | sqrt(x2 p)    -sqrt(x2 (1-p))    -sqrt(x1 x2 / (1-x1))  sqrt(x3/(1-x1))   |
/// | sqrt(x3 p)    -sqrt(x3 (1-p))    -sqrt(x1 x3 / (1-x1)) -sqrt(x2/(1-x1))   |
/// ```
///
/// The (4,4) entry is the simplification of `-x2 / sqrt(x2 (1-x1))`, which
/// stays finite at `x2 = 0`. Requires `x1 > 0` and `x2 > 0`; for `x1 = 0` use
/// [`build_v_two_mix`].
pub fn build_v_three_mix(weights: &MixingWeights, p: f64) -> Result<AncillaUnitary> {
    let [x1, x2, x3] = weights.as_array();
    if x1 == 0.0 {
        return Err(Error::DegenerateParametrization(
            "x1 = 0 is a two-way mixture; use build_v_two_mix".into(),
        ));
    }
    if x2 == 0.0 {
        return Err(Error::DegenerateParametrization(
            "x2 = 0 leaves the third column undefined; use build_v_two_mix after relabeling axes".into(),
        ));
    }
    check_p(p)?;
    let r = |v: f64| C64::new(v, 0.0);
    let q = 1.0 - p;
    let rest = 1.0 - x1;
    let matrix = ComplexMatrix::new(
        4,
        4,
        vec![
            r(q.sqrt()),
            r(p.sqrt()),
            r(0.0),
            r(0.0),
            //
            r((x1 * p).sqrt()),
            r(-(x1 * q).sqrt()),
            r(rest.sqrt()),
            r(0.0),
            //
            r((x2 * p).sqrt()),
            r(-(x2 * q).sqrt()),
            r(-(x1 * x2 / rest).sqrt()),
            r((x3 / rest).sqrt()),
            //
            r((x3 * p).sqrt()),
            r(-(x3 * q).sqrt()),
            r(-(x1 * x3 / rest).sqrt()),
            r(-(x2 / rest).sqrt()),
        ],
    );
    Ok(AncillaUnitary {
        matrix,
        kind: MixKind::ThreeMix { weights: *weights },
        p,
    })
}

/// The controlled-Pauli operation
/// `U = s0 (x) |00><00| + s1 (x) |01><01| + s2 (x) |10><10| + s3 (x) |11><11|`.
pub fn build_controlled_u() -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(8, 8);
    for k in 0..4 {
        let mut proj = ComplexMatrix::zeros(4, 4);
        proj.set(k, k, C64::ONE);
        u = &u + &pauli_operator(k).tensor(&proj);
    }
    u
}

/// The assembled circuit: `total = (I2 (x) W) U (I2 (x) V)` with `W = I4`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationCircuit {
    v: AncillaUnitary,
    u: ComplexMatrix,
    w: ComplexMatrix,
    total: ComplexMatrix,
}

impl DilationCircuit {
    pub fn v(&self) -> &AncillaUnitary {
        &self.v
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    /// The full 8x8 unitary applied to system (x) ancillas.
    pub fn total(&self) -> &ComplexMatrix {
        &self.total
    }

    /// Builds the circuit realizing `m` at decoherence value `p`: the two-way
    /// form when `x1 = 0`, the three-way form otherwise.
    pub fn for_mixture(m: &PauliMixture, p: f64) -> Result<Self> {
        let w = m.weights();
        let v = if w.x1() == 0.0 {
            build_v_two_mix(w.x3(), p)?
        } else {
            build_v_three_mix(w, p)?
        };
        Ok(assemble(v))
    }
}

/// Assembles the full unitary from an ancilla unitary, with `W` the identity.
pub fn assemble(v: AncillaUnitary) -> DilationCircuit {
    let i2 = ComplexMatrix::identity(2);
    let u = build_controlled_u();
    let w = ComplexMatrix::identity(4);
    let total = i2.tensor(&w).matmul(&u).matmul(&i2.tensor(v.matrix()));
    DilationCircuit { v, u, w, total }
}

/// Kraus operators read off the circuit: with `W = I`, `E_k = V[k,0] sigma_k`.
pub fn kraus_from_dilation(circ: &DilationCircuit) -> Result<KrausSet> {
    let col = circ.v().first_column();
    let operators = (0..4)
        .map(|k| pauli_operator(k).scale(col[k]))
        .collect();
    KrausSet::new(operators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::Preset;
    use crate::qmath::{BlochVector, DensityMatrix};

    #[test]
    fn two_mix_v_at_p0() {
        let v = build_v_two_mix(0.5, 0.0).unwrap();
        let col = v.first_column();
        assert!((col[0] - C64::ONE).norm() < 1e-15);
        for entry in &col[1..] {
            assert!(entry.norm() < 1e-15);
        }
        assert!(v.matrix().is_unitary(1e-12));
    }

    #[test]
    fn two_mix_v_is_unitary() {
        let v = build_v_two_mix(0.25, 0.3).unwrap();
        assert!(v.matrix().is_unitary(1e-12));
    }

    #[test]
    fn two_mix_first_column_norms() {
        let (a, p) = (0.35, 0.21);
        let v = build_v_two_mix(a, p).unwrap();
        let col = v.first_column();
        let want = [1.0 - p, 0.0, p * (1.0 - a), a * p];
        let mut sum = 0.0;
        for (c, w) in col.iter().zip(want) {
            assert!((c.norm_sqr() - w).abs() < 1e-14);
            sum += c.norm_sqr();
        }
        assert!((sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_mix_entries_match_prescription() {
        let (a, p) = (0.25, 0.3);
        let v = build_v_two_mix(a, p).unwrap();
        let q = 1.0 - p;
        let want = [
            [q.sqrt(), p.sqrt(), 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [(p * (1.0 - a)).sqrt(), -((1.0 - a) * q).sqrt(), 0.0, a.sqrt()],
            [(a * p).sqrt(), -(a * q).sqrt(), 0.0, -(1.0 - a).sqrt()],
        ];
        for (i, row) in want.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                assert!((v.matrix().get(i, j).re - cell).abs() < 1e-15);
                assert!(v.matrix().get(i, j).im == 0.0);
            }
        }
    }

    #[test]
    fn three_mix_v_is_unitary() {
        let third = 1.0 / 3.0;
        let w = MixingWeights::new(third, third, third).unwrap();
        let v = build_v_three_mix(&w, 0.3).unwrap();
        assert!(v.matrix().is_unitary(1e-12));
    }

    #[test]
    fn three_mix_v_at_p0() {
        let w = MixingWeights::new(0.2, 0.4, 0.4).unwrap();
        let v = build_v_three_mix(&w, 0.0).unwrap();
        let col = v.first_column();
        assert!((col[0] - C64::ONE).norm() < 1e-15);
        for entry in &col[1..] {
            assert!(entry.norm() < 1e-15);
        }
    }

    #[test]
    fn three_mix_third_column_normalized() {
        // (1-x1) + x1 x2/(1-x1) + x1 x3/(1-x1) = 1 given x2 + x3 = 1 - x1
        for (x1, x2, x3) in [(0.2, 0.4, 0.4), (0.3, 0.4, 0.3), (0.6, 0.3, 0.1)] {
            let w = MixingWeights::new(x1, x2, x3).unwrap();
            let v = build_v_three_mix(&w, 0.17).unwrap();
            let norm: f64 = (0..4).map(|i| v.matrix().get(i, 2).norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn three_mix_rejects_degenerate_weights() {
        let w = MixingWeights::new(0.0, 0.5, 0.5).unwrap();
        assert!(matches!(
            build_v_three_mix(&w, 0.1),
            Err(Error::DegenerateParametrization(_))
        ));
        let w = MixingWeights::new(0.5, 0.0, 0.5).unwrap();
        assert!(matches!(
            build_v_three_mix(&w, 0.1),
            Err(Error::DegenerateParametrization(_))
        ));
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(build_v_two_mix(1.5, 0.1).is_err());
        assert!(build_v_two_mix(0.5, 0.5).is_err());
        assert!(build_v_two_mix(0.5, -0.1).is_err());
    }

    fn basis_ket(dim: usize, k: usize) -> Vec<C64> {
        let mut v = vec![C64::ZERO; dim];
        v[k] = C64::ONE;
        v
    }

    fn apply(m: &ComplexMatrix, ket: &[C64]) -> Vec<C64> {
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j) * ket[j]).sum())
            .collect()
    }

    #[test]
    fn controlled_u_branch_actions() {
        let u = build_controlled_u();
        assert!(u.is_unitary(1e-14));

        // |0>|00> untouched (sigma_0 branch)
        let out = apply(&u, &basis_ket(8, 0));
        assert!((out[0] - C64::ONE).norm() < 1e-15);

        // |0>|01> -> |1>|01| (sigma_1 branch flips the system)
        let out = apply(&u, &basis_ket(8, 1));
        assert!((out[5] - C64::ONE).norm() < 1e-15);

        // |0>|10> -> i |1>|10> (sigma_2 branch)
        let out = apply(&u, &basis_ket(8, 2));
        assert!((out[6] - C64::new(0.0, 1.0)).norm() < 1e-15);

        // |1>|11> -> -|1>|11> (sigma_3 branch)
        let out = apply(&u, &basis_ket(8, 7));
        assert!((out[7] + C64::ONE).norm() < 1e-15);
    }

    #[test]
    fn assembled_circuit_is_unitary() {
        for preset in Preset::ALL {
            let m = preset.mixture();
            for i in 0..50 {
                let p = 0.49 * i as f64 / 49.0;
                let circ = DilationCircuit::for_mixture(&m, p).unwrap();
                assert!(circ.v().matrix().is_unitary(1e-10));
                assert!(circ.total().is_unitary(1e-10), "{} p={p}", preset.name());
            }
        }
    }

    #[test]
    fn assemble_keeps_w_identity() {
        let circ = assemble(build_v_two_mix(0.5, 0.2).unwrap());
        assert_eq!(circ.w(), &ComplexMatrix::identity(4));
    }

    #[test]
    fn p0_circuit_leaves_system_untouched() {
        let circ = assemble(build_v_two_mix(0.5, 0.0).unwrap());
        // |0>|00> must map to a state whose system factor is |0>
        let out = apply(circ.total(), &basis_ket(8, 0));
        for (b, amp) in out.iter().enumerate() {
            if b >= 4 {
                assert!(amp.norm() < 1e-15, "system flipped at basis index {b}");
            }
        }
    }

    #[test]
    fn kraus_operators_match_symbolic_products() {
        let (a, p) = (0.25, 0.3);
        let ks = kraus_from_dilation(&assemble(build_v_two_mix(a, p).unwrap())).unwrap();
        let want = [
            pauli_operator(0).scale(C64::new((1.0f64 - p).sqrt(), 0.0)),
            ComplexMatrix::zeros(2, 2),
            pauli_operator(2).scale(C64::new(((1.0 - a) * p).sqrt(), 0.0)),
            pauli_operator(3).scale(C64::new((a * p).sqrt(), 0.0)),
        ];
        for (op, w) in ks.operators().iter().zip(&want) {
            assert!(op.max_abs_diff(w) < 1e-14);
        }

        let weights = MixingWeights::new(0.2, 0.4, 0.4).unwrap();
        let ks = kraus_from_dilation(&assemble(build_v_three_mix(&weights, p).unwrap())).unwrap();
        for (k, &x) in weights.as_array().iter().enumerate() {
            let w = pauli_operator(k + 1).scale(C64::new((x * p).sqrt(), 0.0));
            assert!(ks.operators()[k + 1].max_abs_diff(&w) < 1e-14);
        }
    }

    #[test]
    fn kraus_at_p0_is_identity() {
        let ks = kraus_from_dilation(&assemble(build_v_two_mix(0.7, 0.0).unwrap())).unwrap();
        assert!(ks.operators()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        for op in &ks.operators()[1..] {
            assert!(op.frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn total_unitary_blocks_reproduce_kraus() {
        // <s', k| total |s, 00> = (E_k)_{s', s}
        for preset in Preset::ALL {
            let m = preset.mixture();
            let p = 0.23;
            let circ = DilationCircuit::for_mixture(&m, p).unwrap();
            let ks = kraus_from_dilation(&circ).unwrap();
            for k in 0..4 {
                for sp in 0..2 {
                    for s in 0..2 {
                        let block = circ.total().get(4 * sp + k, 4 * s);
                        let ek = ks.operators()[k].get(sp, s);
                        assert!((block - ek).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn dilation_channel_matches_mixture() {
        let mut seed = 1u64;
        for preset in Preset::ALL {
            let m = preset.mixture();
            for _ in 0..4 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                let r = (seed >> 11) as f64 / (1u64 << 53) as f64;
                let b = BlochVector::new(0.8 * r, 0.3 * (1.0 - r), 0.4 * r - 0.2).unwrap();
                let rho = DensityMatrix::from_bloch(&b).unwrap();
                for &t in &[0.1, 0.7, 1.4] {
                    let p = m.decoherence().p(t).unwrap();
                    let circ = DilationCircuit::for_mixture(&m, p).unwrap();
                    let via_kraus = kraus_from_dilation(&circ).unwrap().apply(&rho).unwrap();
                    let direct = m.apply(&rho, t).unwrap();
                    assert!(
                        (via_kraus.matrix() - direct.matrix()).frobenius_norm() < 1e-12
                    );
                }
            }
        }
    }
}
