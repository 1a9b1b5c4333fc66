//! Dense complex linear algebra on the small Hilbert spaces of the scenario.
//!
//! Everything here is exact dense arithmetic on matrices of dimension at most
//! 16. Multi-system operators follow a single tensor convention: the leftmost
//! factor is the most significant digit of the row-major index, so for a
//! layout `[B, C, T]` the basis state `|b c t⟩` sits at index `4b + 2c + t`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::TOL;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Validation(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(rows * cols, data.len()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// `|row⟩⟨col|` in dimension `dim`.
    pub fn ket_bra(row: usize, col: usize, dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m.data[row * dim + col] = ONE;
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m.data[i * v.len() + j] = ui * vj.conj();
            }
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.cols + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dims(
                format!("{} rows", self.cols),
                format!("{} rows", rhs.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self - rhs`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |M − M†| entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// Whether `self + shift·I` admits a Cholesky factorization, i.e. every
    /// eigenvalue exceeds `-shift`. Assumes Hermitian input.
    pub fn is_positive_semidefinite(&self, shift: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + shift;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d <= 0.0 || !d.is_finite() {
                return false;
            }
            let djj = d.sqrt();
            l[j * n + j] = C64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product, leftmost factor most significant.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a.get(ar, ac);
            if s == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out.data[(ar * b.rows + br) * cols + ac * b.cols + bc] = s * b.get(br, bc);
                }
            }
        }
    }
    out
}

/// Physical systems of the scenario: Bob's qubit, the switch control, the switch target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    B,
    C,
    T,
}

/// Ordered tensor factors; the first entry is the most significant index digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    factors: Vec<(Subsystem, usize)>,
}

impl SubsystemLayout {
    pub fn new(factors: Vec<(Subsystem, usize)>) -> Result<Self> {
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::Config(format!(
                    "subsystem {label:?} has zero dimension"
                )));
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::Config(format!("subsystem {label:?} listed twice")));
            }
        }
        Ok(Self { factors })
    }

    /// The `B ⊗ C ⊗ T` qubit layout used throughout the simulation.
    pub fn bct() -> Self {
        Self::new(vec![
            (Subsystem::B, 2),
            (Subsystem::C, 2),
            (Subsystem::T, 2),
        ])
        .unwrap()
    }

    /// The `C ⊗ T` layout the switch acts on.
    pub fn ct() -> Self {
        Self::new(vec![(Subsystem::C, 2), (Subsystem::T, 2)]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn factors(&self) -> &[(Subsystem, usize)] {
        &self.factors
    }

    pub fn position(&self, label: Subsystem) -> Option<usize> {
        self.factors.iter().position(|(l, _)| *l == label)
    }

    /// Tensor product of `ops` placed on their subsystems, identity elsewhere.
    pub fn embed(&self, ops: &[(Subsystem, &ComplexMatrix)]) -> Result<ComplexMatrix> {
        for (label, op) in ops {
            let pos = self
                .position(*label)
                .ok_or_else(|| Error::Config(format!("subsystem {label:?} not in layout")))?;
            let dim = self.factors[pos].1;
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::dims(
                    format!("{dim}x{dim} on {label:?}"),
                    format!("{}x{}", op.rows(), op.cols()),
                ));
            }
        }
        let mut out = ComplexMatrix::identity(1);
        for (label, dim) in &self.factors {
            let factor = match ops.iter().find(|(l, _)| l == label) {
                Some((_, op)) => (*op).clone(),
                None => ComplexMatrix::identity(*dim),
            };
            out = tensor(&out, &factor);
        }
        Ok(out)
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factors.len()];
        for (slot, (_, dim)) in digits.iter_mut().zip(&self.factors).rev() {
            *slot = index % dim;
            index /= dim;
        }
        digits
    }
}

/// A valid (possibly sub-normalized) density operator.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::dims(
                "square matrix",
                format!("{}x{}", matrix.rows(), matrix.cols()),
            ));
        }
        let herm = matrix.hermiticity_defect();
        if herm > TOL.algebraic {
            return Err(Error::Validation(format!(
                "density matrix not Hermitian (defect {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if tr.im.abs() > TOL.algebraic || tr.re < -TOL.algebraic || tr.re > 1.0 + TOL.algebraic {
            return Err(Error::Validation(format!(
                "density matrix trace {tr} out of range"
            )));
        }
        if !matrix.is_positive_semidefinite(TOL.positivity) {
            return Err(Error::Validation(
                "density matrix not positive semidefinite".into(),
            ));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a state vector (not renormalized).
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr[op · ρ]`, real part (exact for Hermitian `op`).
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        Ok(op.matmul(&self.matrix)?.trace().re)
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix({:?})", self.matrix)
    }
}

/// Traces out every subsystem not listed in `keep`. Kept factors stay in layout order.
pub fn partial_trace(
    rho: &DensityMatrix,
    layout: &SubsystemLayout,
    keep: &[Subsystem],
) -> Result<DensityMatrix> {
    if layout.dim() != rho.dim() {
        return Err(Error::dims(
            format!("layout dimension {}", rho.dim()),
            layout.dim(),
        ));
    }
    for label in keep {
        if layout.position(*label).is_none() {
            return Err(Error::Config(format!("subsystem {label:?} not in layout")));
        }
    }
    let kept: Vec<bool> = layout
        .factors
        .iter()
        .map(|(l, _)| keep.contains(l))
        .collect();
    let out_dim: usize = layout
        .factors
        .iter()
        .zip(&kept)
        .filter(|(_, k)| **k)
        .map(|((_, d), _)| d)
        .product();

    let reduced_index = |digits: &[usize]| -> usize {
        layout
            .factors
            .iter()
            .zip(&kept)
            .zip(digits)
            .filter(|((_, k), _)| **k)
            .fold(0, |acc, (((_, d), _), digit)| acc * d + digit)
    };

    let n = rho.dim();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| layout.digits(i)).collect();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..n {
        for j in 0..n {
            // Contributes only when the traced digits agree.
            let traced_match = kept
                .iter()
                .enumerate()
                .all(|(f, k)| *k || digits[i][f] == digits[j][f]);
            if traced_match {
                let (r, c) = (reduced_index(&digits[i]), reduced_index(&digits[j]));
                out.data[r * out_dim + c] += rho.matrix.get(i, j);
            }
        }
    }
    DensityMatrix::new(out)
}

/// `op · ρ · op†`.
pub fn conjugate_apply(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if op.cols() != rho.dim() || op.rows() != rho.dim() {
        return Err(Error::dims(
            format!("{0}x{0}", rho.dim()),
            format!("{}x{}", op.rows(), op.cols()),
        ));
    }
    DensityMatrix::new(op.matmul(&rho.matrix)?.matmul(&op.adjoint())?)
}

/// Hermitian involution: a ±1-valued observable.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryObservable {
    matrix: ComplexMatrix,
}

impl BinaryObservable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Validation("observable must be square".into()));
        }
        let herm = matrix.hermiticity_defect();
        if herm > TOL.algebraic {
            return Err(Error::Validation(format!(
                "observable not Hermitian (defect {herm:e})"
            )));
        }
        let squared = matrix.matmul(&matrix)?;
        let inv = squared.max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if inv > TOL.algebraic {
            return Err(Error::Validation(format!(
                "observable not involutory (defect {inv:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// `cos θ · Z + sin θ · X`.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            matrix: ComplexMatrix::from_real(2, 2, &[c, s, s, -c]).unwrap(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Eigenprojectors `((I + O)/2, (I − O)/2)`; outcome 0 is the +1 eigenvalue.
pub fn projectors_of(obs: &BinaryObservable) -> (ComplexMatrix, ComplexMatrix) {
    let id = ComplexMatrix::identity(obs.matrix.rows());
    let plus = id.add(&obs.matrix).unwrap().scale(0.5);
    let minus = id.sub(&obs.matrix).unwrap().scale(0.5);
    (plus, minus)
}

/// Outcome of a Kraus completeness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausCheck {
    pub complete: bool,
    /// max entrywise |Σ K†K − I|.
    pub max_deviation: f64,
}

/// Checks `Σ K†K = I` within the algebraic tolerance.
pub fn validate_kraus(ks: &[ComplexMatrix]) -> KrausCheck {
    let fail = KrausCheck {
        complete: false,
        max_deviation: f64::INFINITY,
    };
    let Some(first) = ks.first() else {
        return fail;
    };
    let dim = first.cols();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for k in ks {
        let Ok(kk) = k.adjoint().matmul(k) else {
            return fail;
        };
        let Ok(next) = sum.add(&kk) else {
            return fail;
        };
        sum = next;
    }
    let max_deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    KrausCheck {
        complete: max_deviation <= TOL.algebraic,
        max_deviation,
    }
}
