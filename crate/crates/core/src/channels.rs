//! Pauli dephasing semigroups and their convex mixtures.
//!
//! A single semigroup acts as `rho -> (1 - p(t)) rho + p(t) s_i rho s_i` with
//! decoherence function `p(t) = (1 - exp(-c t)) / 2`. Mixing the three axes
//! with weights `(x1, x2, x3)` gives the output map studied here. The mixture
//! is available in three equivalent forms (direct action, Kraus operators,
//! and the diagonal Pauli transfer representation); keeping the three routes
//! in exact agreement is part of the module's test surface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{BlochVector, ComplexMatrix, DensityMatrix, C64, IDENTITY_TOL, VALIDITY_TOL};

/// Pauli matrix `sigma_k` for k = 0..=3 (identity, x, y, z).
pub fn pauli_operator(k: usize) -> ComplexMatrix {
    let c = C64::new;
    match k {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::new(
            2,
            2,
            vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        ),
        2 => ComplexMatrix::new(
            2,
            2,
            vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
        ),
        3 => ComplexMatrix::new(
            2,
            2,
            vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        ),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// One of the three non-identity Pauli axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

// Serialized as the 1-based axis index.
impl Serialize for PauliAxis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.index() as u8)
    }
}

impl<'de> Deserialize<'de> for PauliAxis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let idx = u8::deserialize(d)?;
        PauliAxis::from_index(idx as usize).map_err(serde::de::Error::custom)
    }
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// 1-based index as conventionally written (sigma_1, sigma_2, sigma_3).
    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 1,
            PauliAxis::Y => 2,
            PauliAxis::Z => 3,
        }
    }

    pub fn from_index(index: usize) -> Result<Self> {
        match index {
            1 => Ok(PauliAxis::X),
            2 => Ok(PauliAxis::Y),
            3 => Ok(PauliAxis::Z),
            _ => Err(Error::OutOfRange {
                name: "pauli axis index",
                value: index as f64,
                min: 1.0,
                max: 3.0,
            }),
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        pauli_operator(self.index())
    }
}

/// Exponential decoherence function `p(t) = (1 - exp(-c t)) / 2` with rate
/// constant `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceFunction {
    c: f64,
}

impl DecoherenceFunction {
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::OutOfRange {
                name: "c",
                value: c,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        Ok(Self { c })
    }

    pub fn rate_constant(&self) -> f64 {
        self.c
    }

    /// `p(t)`: zero at t = 0, strictly increasing, approaching 1/2.
    pub fn p(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(0.5 * (1.0 - (-self.c * t).exp()))
    }

    /// `dp/dt = (c/2) exp(-c t)`.
    pub fn p_dot(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(0.5 * self.c * (-self.c * t).exp())
    }
}

/// Convex mixing weights `(x1, x2, x3)`: non-negative, summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingWeights {
    x1: f64,
    x2: f64,
    x3: f64,
}

impl MixingWeights {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        for (name, x) in [("x1", x1), ("x2", x2), ("x3", x3)] {
            if !(0.0..=1.0).contains(&x) || !x.is_finite() {
                return Err(Error::InvalidWeights(format!("{name} = {x} not in [0, 1]")));
            }
        }
        let sum = x1 + x2 + x3;
        if (sum - 1.0).abs() > IDENTITY_TOL {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, must be 1 within {IDENTITY_TOL:e}"
            )));
        }
        Ok(Self { x1, x2, x3 })
    }

    /// Two-way mixing `a L3 + (1 - a) L2`, i.e. weights `(0, 1 - a, a)`.
    pub fn two_mix(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::OutOfRange {
                name: "a",
                value: a,
                min: 0.0,
                max: 1.0,
            });
        }
        Self::new(0.0, 1.0 - a, a)
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn x3(&self) -> f64 {
        self.x3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn weight(&self, axis: PauliAxis) -> f64 {
        self.as_array()[axis.index() - 1]
    }
}

/// A convex mixture of the three Pauli semigroups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliMixture {
    weights: MixingWeights,
    decoherence: DecoherenceFunction,
}

impl PauliMixture {
    pub fn new(weights: MixingWeights, decoherence: DecoherenceFunction) -> Self {
        Self {
            weights,
            decoherence,
        }
    }

    pub fn three_mix(x1: f64, x2: f64, x3: f64, c: f64) -> Result<Self> {
        Ok(Self::new(
            MixingWeights::new(x1, x2, x3)?,
            DecoherenceFunction::new(c)?,
        ))
    }

    pub fn two_mix(a: f64, c: f64) -> Result<Self> {
        Ok(Self::new(
            MixingWeights::two_mix(a)?,
            DecoherenceFunction::new(c)?,
        ))
    }

    pub fn weights(&self) -> &MixingWeights {
        &self.weights
    }

    pub fn decoherence(&self) -> &DecoherenceFunction {
        &self.decoherence
    }

    /// Applies the mixture at time `t`.
    pub fn apply(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        self.apply_at(self.decoherence.p(t)?, rho)
    }

    /// Applies the mixture at a given decoherence value `p`.
    pub fn apply_at(&self, p: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_p(p)?;
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: rho.dim(),
            });
        }
        let mut out = rho.matrix().scale(C64::new(1.0 - p, 0.0));
        for axis in PauliAxis::ALL {
            let w = self.weights.weight(axis);
            if w == 0.0 {
                continue;
            }
            let s = axis.matrix();
            let conj = s.matmul(rho.matrix()).matmul(&s);
            out = &out + &conj.scale(C64::new(w * p, 0.0));
        }
        DensityMatrix::new(out)
    }

    /// Kraus operators at time `t`:
    /// `{sqrt(1-p) I, sqrt(x1 p) s1, sqrt(x2 p) s2, sqrt(x3 p) s3}`.
    pub fn kraus(&self, t: f64) -> Result<KrausSet> {
        self.kraus_at(self.decoherence.p(t)?)
    }

    pub fn kraus_at(&self, p: f64) -> Result<KrausSet> {
        check_p(p)?;
        let [x1, x2, x3] = self.weights.as_array();
        let coeffs = [1.0 - p, x1 * p, x2 * p, x3 * p];
        let operators = coeffs
            .iter()
            .enumerate()
            .map(|(k, &w)| pauli_operator(k).scale(C64::new(w.sqrt(), 0.0)))
            .collect();
        KrausSet::new(operators)
    }

    /// Diagonal Pauli transfer representation at time `t`:
    /// `lambda_i = 1 - 2 p (1 - x_i)`.
    pub fn ptm(&self, t: f64) -> Result<PauliTransferDiagonal> {
        self.ptm_at(self.decoherence.p(t)?)
    }

    pub fn ptm_at(&self, p: f64) -> Result<PauliTransferDiagonal> {
        check_p(p)?;
        let [x1, x2, x3] = self.weights.as_array();
        PauliTransferDiagonal::new(
            1.0 - 2.0 * p * (1.0 - x1),
            1.0 - 2.0 * p * (1.0 - x2),
            1.0 - 2.0 * p * (1.0 - x3),
        )
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// Applies the single-axis semigroup `L_i(t)` to a state.
pub fn apply_semigroup(
    axis: PauliAxis,
    f: &DecoherenceFunction,
    rho: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    apply_semigroup_at(axis, f.p(t)?, rho)
}

/// Applies `rho -> (1 - p) rho + p s_i rho s_i` at a fixed `p`.
pub fn apply_semigroup_at(axis: PauliAxis, p: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_p(p)?;
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho.dim(),
        });
    }
    let s = axis.matrix();
    let conj = s.matmul(rho.matrix()).matmul(&s);
    let out = &rho.matrix().scale(C64::new(1.0 - p, 0.0)) + &conj.scale(C64::new(p, 0.0));
    DensityMatrix::new(out)
}

/// Operator-sum representation: `rho -> sum_k E_k rho E_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Validates completeness `sum_k E_k† E_k = I` within [`VALIDITY_TOL`].
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidState("empty Kraus set".into()));
        }
        let dim = operators[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for op in &operators {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: op.rows(),
                });
            }
            sum = &sum + &op.adjoint().matmul(op);
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > VALIDITY_TOL {
            return Err(Error::InvalidState(
                "Kraus completeness sum E†E = I violated".into(),
            ));
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let dim = self.operators[0].rows();
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: rho.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(dim, dim);
        for op in &self.operators {
            out = &out + &op.matmul(rho.matrix()).matmul(&op.adjoint());
        }
        DensityMatrix::new(out)
    }
}

/// Eigenvalues of a Pauli channel acting on the Bloch components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliTransferDiagonal {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl PauliTransferDiagonal {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2), ("lambda3", lambda3)] {
            if l.abs() > 1.0 + IDENTITY_TOL {
                return Err(Error::OutOfRange {
                    name,
                    value: l,
                    min: -1.0,
                    max: 1.0,
                });
            }
        }
        Ok(Self {
            lambda1,
            lambda2,
            lambda3,
        })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }

    /// Bloch action `r -> (l1 r1, l2 r2, l3 r3)`.
    pub fn bloch_apply(&self, b: &BlochVector) -> Result<BlochVector> {
        BlochVector::new(
            self.lambda1 * b.r1,
            self.lambda2 * b.r2,
            self.lambda3 * b.r3,
        )
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let b = rho.bloch()?;
        DensityMatrix::from_bloch(&self.bloch_apply(&b)?)
    }
}

/// The five bundled mixing configurations exercised throughout the test and
/// command-line surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Equal two-way mix, a = 0.5, c = 2.
    Fig2,
    /// Unequal two-way mix, a = 0.25, c = 2.
    Fig3,
    /// Equal three-way mix, x = (1/3, 1/3, 1/3), c = 3.
    Fig4,
    /// Unequal three-way mix, x = (0.3, 0.4, 0.3), c = 3.
    Fig5,
    /// Unequal three-way mix, x = (0.2, 0.4, 0.4), c = 3.
    Fig6,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
    ];

    pub fn mixture(self) -> PauliMixture {
        let third = 1.0 / 3.0;
        match self {
            Preset::Fig2 => PauliMixture::two_mix(0.5, 2.0),
            Preset::Fig3 => PauliMixture::two_mix(0.25, 2.0),
            Preset::Fig4 => PauliMixture::three_mix(third, third, third, 3.0),
            Preset::Fig5 => PauliMixture::three_mix(0.3, 0.4, 0.3, 3.0),
            Preset::Fig6 => PauliMixture::three_mix(0.2, 0.4, 0.4, 3.0),
        }
        .expect("preset parameters are valid")
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            "fig6" => Ok(Preset::Fig6),
            other => Err(Error::InvalidWeights(format!(
                "unknown preset '{other}' (expected fig2..fig6)"
            ))),
        }
    }
}
