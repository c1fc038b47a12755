//! Monte-Carlo checks of Gaussian moment identities.
//!
//! `E` is an `n1 x n2` matrix with i.i.d. `N(0, σ²)` entries. The degree-2
//! identities are
//!
//! | id      | monomial      | expectation      |
//! |---------|---------------|------------------|
//! | `EAE`   | `E A E`       | `σ² Aᵀ`          |
//! | `EAET`  | `E A Eᵀ`      | `σ² Tr(A) I`     |
//! | `TrEAE` | `Tr(E A) E`   | `σ² Aᵀ`          |
//!
//! The degree-4 identities are monomials `X₁ A X₂ B X₃ C X₄` where each `Xᵢ`
//! is `E` or `Eᵀ`. The transpose pattern (1 marks `Eᵀ`) and closed form, all
//! terms carrying a factor `σ⁴`, are
//!
//! | id     | pattern | expectation / σ⁴                          |
//! |--------|---------|-------------------------------------------|
//! | `D4_1` | 0101    | `Tr C Tr A B + Tr(ACᵀ) Bᵀ + Tr B Tr(AC) I` |
//! | `D4_2` | 0011    | `AᵀBCᵀ + CBA + Tr B Tr(AC) I`             |
//! | `D4_3` | 1001    | `Tr C Tr A B + CBA + CᵀBAᵀ`               |
//! | `D4_4` | 1000    | `Tr A BCᵀ + CAᵀBᵀ + Tr(ABᵀC) I`           |
//! | `D4_5` | 0100    | `Tr A BCᵀ + BᵀCᵀA + Tr B CᵀAᵀ`            |
//! | `D4_6` | 0010    | `Tr C AᵀB + CAᵀBᵀ + Tr B CᵀAᵀ`            |
//! | `D4_7` | 0001    | `Tr C AᵀB + BᵀCᵀA + Tr(ABᵀC) I`           |
//! | `D4_8` | 0000    | `AᵀBCᵀ + Tr(ACᵀ) Bᵀ + CᵀBAᵀ`              |
//!
//! Operand shapes follow from the pattern: `A` is `cols(X₁) x rows(X₂)`, `B`
//! is `cols(X₂) x rows(X₃)` and `C` is `cols(X₃) x rows(X₄)`.
//!
//! `ODD5` is the odd-degree monomial `E A E A E`, whose expectation is zero.

use std::fmt;
use std::str::FromStr;

use crate::error::{JiveError, Result};
use crate::matrixkit::Matrix;
use crate::par::map_indexed;
use crate::rng::{self, Stream};

/// Samples per independently seeded batch.
pub const BATCH: usize = 8192;

/// Smallest accepted Monte-Carlo sample count.
pub const MIN_SAMPLES: usize = 10_000;

const DEG4_PATTERNS: [[bool; 4]; 8] = [
    [false, true, false, true],
    [false, false, true, true],
    [true, false, false, true],
    [true, false, false, false],
    [false, true, false, false],
    [false, false, true, false],
    [false, false, false, true],
    [false, false, false, false],
];

/// One of the moment identities. `Deg4(i)` carries `i ∈ 1..=8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    Eae,
    EaeT,
    TrEae,
    Deg4(u8),
    Odd5,
}

impl Identity {
    pub fn all() -> Vec<Identity> {
        let mut ids = vec![Identity::Eae, Identity::EaeT, Identity::TrEae];
        ids.extend((1..=8).map(Identity::Deg4));
        ids.push(Identity::Odd5);
        ids
    }

    pub fn degree(&self) -> usize {
        match self {
            Identity::Eae | Identity::EaeT | Identity::TrEae => 2,
            Identity::Deg4(_) => 4,
            Identity::Odd5 => 3,
        }
    }

    /// Transpose pattern of a degree-4 identity.
    pub fn pattern(&self) -> Option<[bool; 4]> {
        match self {
            Identity::Deg4(i @ 1..=8) => Some(DEG4_PATTERNS[*i as usize - 1]),
            _ => None,
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Identity::Deg4(i) if !(1..=8).contains(i) => Err(JiveError::UnknownIdentity(format!("D4_{i}"))),
            _ => Ok(()),
        }
    }

    /// Shapes of the operands for a given `n1 x n2` noise matrix.
    pub fn operand_shapes(&self, n1: usize, n2: usize) -> Result<Vec<(usize, usize)>> {
        self.check()?;
        Ok(match self {
            Identity::Eae | Identity::TrEae | Identity::Odd5 => vec![(n2, n1)],
            Identity::EaeT => vec![(n2, n2)],
            Identity::Deg4(_) => {
                let p = self.pattern().expect("checked");
                let x = |t: bool| if t { (n2, n1) } else { (n1, n2) };
                (0..3).map(|i| (x(p[i]).1, x(p[i + 1]).0)).collect()
            }
        })
    }

    /// Shape of the monomial.
    pub fn output_shape(&self, n1: usize, n2: usize) -> Result<(usize, usize)> {
        self.check()?;
        Ok(match self {
            Identity::Eae | Identity::TrEae | Identity::Odd5 => (n1, n2),
            Identity::EaeT => (n1, n1),
            Identity::Deg4(_) => {
                let p = self.pattern().expect("checked");
                let first = if p[0] { n2 } else { n1 };
                let last = if p[3] { n1 } else { n2 };
                (first, last)
            }
        })
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identity::Eae => f.write_str("EAE"),
            Identity::EaeT => f.write_str("EAET"),
            Identity::TrEae => f.write_str("TrEAE"),
            Identity::Deg4(i) => write!(f, "D4_{i}"),
            Identity::Odd5 => f.write_str("ODD5"),
        }
    }
}

impl FromStr for Identity {
    type Err = JiveError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EAE" => Ok(Identity::Eae),
            "EAET" => Ok(Identity::EaeT),
            "TrEAE" => Ok(Identity::TrEae),
            "ODD5" => Ok(Identity::Odd5),
            _ => s
                .strip_prefix("D4_")
                .and_then(|i| i.parse::<u8>().ok())
                .filter(|i| (1..=8).contains(i))
                .map(Identity::Deg4)
                .ok_or_else(|| JiveError::UnknownIdentity(s.to_string())),
        }
    }
}

fn check_shapes(id: Identity, operands: &[&Matrix], n1: usize, n2: usize) -> Result<()> {
    let shapes = id.operand_shapes(n1, n2)?;
    if operands.len() < shapes.len() {
        return Err(JiveError::DimensionMismatch(format!(
            "{id} needs {} operands, got {}",
            shapes.len(),
            operands.len()
        )));
    }
    for (i, (m, want)) in operands.iter().zip(&shapes).enumerate() {
        if m.shape() != *want {
            return Err(JiveError::DimensionMismatch(format!(
                "{id} operand {i} must be {}x{} for a {n1}x{n2} noise matrix, got {}x{}",
                want.0,
                want.1,
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

/// Closed-form expectation of a degree-2 monomial.
pub fn closed_form_deg2(identity: Identity, a: &Matrix, sigma: f64, n1: usize, n2: usize) -> Result<Matrix> {
    if identity.degree() != 2 {
        return Err(JiveError::UnknownIdentity(format!(
            "{identity} is not a degree-2 identity"
        )));
    }
    check_shapes(identity, &[a], n1, n2)?;
    let s2 = sigma * sigma;
    Ok(match identity {
        Identity::EaeT => Matrix::identity(n1).scale(s2 * a.trace()),
        _ => a.transpose().scale(s2),
    })
}

/// Infers `(n1, n2)` from the operand shapes of a degree-4 identity.
fn infer_noise_shape(p: [bool; 4], a: &Matrix, b: &Matrix, c: &Matrix) -> Result<(usize, usize)> {
    // (value, is_n1) constraints from each operand dimension
    let side = |t: bool, is_cols: bool| if is_cols { t } else { !t };
    let mut n = [None::<usize>, None::<usize>];
    let ops = [a, b, c];
    for (i, m) in ops.iter().enumerate() {
        // rows(op_i) = cols(X_i); cols(op_i) = rows(X_{i+1})
        for (value, is_n1) in [(m.rows(), side(p[i], true)), (m.cols(), side(p[i + 1], false))] {
            let slot = &mut n[usize::from(!is_n1)];
            match slot {
                Some(v) if *v != value => {
                    return Err(JiveError::DimensionMismatch(format!(
                        "operand shapes {:?}, {:?}, {:?} do not fit one noise matrix",
                        a.shape(),
                        b.shape(),
                        c.shape()
                    )))
                }
                _ => *slot = Some(value),
            }
        }
    }
    Ok((n[0].expect("always constrained"), n[1].expect("always constrained")))
}

/// Closed-form expectation of a degree-4 monomial.
pub fn closed_form_deg4(identity: Identity, a: &Matrix, b: &Matrix, c: &Matrix, sigma: f64) -> Result<Matrix> {
    let p = identity
        .pattern()
        .ok_or_else(|| JiveError::UnknownIdentity(format!("{identity} is not a degree-4 identity")))?;
    let (n1, n2) = infer_noise_shape(p, a, b, c)?;
    let Identity::Deg4(i) = identity else { unreachable!() };
    let (at, bt, ct) = (a.transpose(), b.transpose(), c.transpose());
    let (out_rows, _) = identity.output_shape(n1, n2)?;
    let eye = || Matrix::identity(out_rows);
    let mm = |x: &Matrix, y: &Matrix| x.matmul(y);
    let mm3 = |x: &Matrix, y: &Matrix, z: &Matrix| x.matmul(y)?.matmul(z);
    let tr = |x: &Matrix| x.trace();
    let terms: [Matrix; 3] = match i {
        1 => [
            b.scale(tr(c) * tr(a)),
            bt.scale(tr(&mm(a, &ct)?)),
            eye().scale(tr(b) * tr(&mm(a, c)?)),
        ],
        2 => [mm3(&at, b, &ct)?, mm3(c, b, a)?, eye().scale(tr(b) * tr(&mm(a, c)?))],
        3 => [b.scale(tr(c) * tr(a)), mm3(c, b, a)?, mm3(&ct, b, &at)?],
        4 => [
            mm(b, &ct)?.scale(tr(a)),
            mm3(c, &at, &bt)?,
            eye().scale(tr(&mm3(a, &bt, c)?)),
        ],
        5 => [mm(b, &ct)?.scale(tr(a)), mm3(&bt, &ct, a)?, mm(&ct, &at)?.scale(tr(b))],
        6 => [mm(&at, b)?.scale(tr(c)), mm3(c, &at, &bt)?, mm(&ct, &at)?.scale(tr(b))],
        7 => [
            mm(&at, b)?.scale(tr(c)),
            mm3(&bt, &ct, a)?,
            eye().scale(tr(&mm3(a, &bt, c)?)),
        ],
        8 => [mm3(&at, b, &ct)?, bt.scale(tr(&mm(a, &ct)?)), mm3(&ct, b, &at)?],
        _ => return Err(JiveError::UnknownIdentity(identity.to_string())),
    };
    let mut out = terms[0].clone();
    out.add_assign(&terms[1])?;
    out.add_assign(&terms[2])?;
    out.scale_mut(sigma.powi(4));
    Ok(out)
}

/// Closed form of any identity; `ODD5` is the zero matrix.
pub fn closed_form(identity: Identity, operands: &[Matrix], sigma: f64, n1: usize, n2: usize) -> Result<Matrix> {
    let refs: Vec<&Matrix> = operands.iter().collect();
    check_shapes(identity, &refs, n1, n2)?;
    match identity.degree() {
        2 => closed_form_deg2(identity, &operands[0], sigma, n1, n2),
        4 => closed_form_deg4(identity, &operands[0], &operands[1], &operands[2], sigma),
        _ => {
            let (r, c) = identity.output_shape(n1, n2)?;
            Ok(Matrix::zeros(r, c))
        }
    }
}

/// Random standard-normal operands of the right shapes.
pub fn random_operands(identity: Identity, n1: usize, n2: usize, seed: u64) -> Result<Vec<Matrix>> {
    let mut stream = Stream::derived(seed, &[rng::STREAM_OPERANDS]);
    identity
        .operand_shapes(n1, n2)?
        .into_iter()
        .map(|(r, c)| {
            let mut data = vec![0.0; r * c];
            stream.fill_normal(&mut data, 1.0);
            Matrix::new(r, c, data)
        })
        .collect()
}

/// Result of a Monte-Carlo check.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub identity: Identity,
    pub closed_form: Matrix,
    pub mc_estimate: Matrix,
    pub max_abs_dev: f64,
    /// Largest entrywise standard error of the Monte-Carlo mean.
    pub max_std_err: f64,
    pub samples: usize,
}

impl MomentReport {
    /// `max_abs_dev ≤ band · max_std_err`.
    pub fn within(&self, band: f64) -> bool {
        self.max_abs_dev <= band * self.max_std_err
    }
}

impl fmt::Display for MomentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat = |m: &Matrix| {
            m.as_slice()
                .iter()
                .map(|x| format!("{x:.16e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(f, "identity={}", self.identity)?;
        writeln!(f, "samples={}", self.samples)?;
        writeln!(f, "shape={}x{}", self.closed_form.rows(), self.closed_form.cols())?;
        writeln!(f, "closed_form={}", flat(&self.closed_form))?;
        writeln!(f, "mc_estimate={}", flat(&self.mc_estimate))?;
        writeln!(f, "max_abs_dev={:.16e}", self.max_abs_dev)?;
        writeln!(f, "max_std_err={:.16e}", self.max_std_err)?;
        write!(f, "within_5se={}", self.within(5.0))
    }
}

/// Dense row-major product into a reused buffer.
fn mul_into(a: &[f64], ar: usize, ac: usize, b: &[f64], bc: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(ar * bc, 0.0);
    for i in 0..ar {
        let row = &mut out[i * bc..(i + 1) * bc];
        for k in 0..ac {
            let aik = a[i * ac + k];
            for (o, bk) in row.iter_mut().zip(&b[k * bc..(k + 1) * bc]) {
                *o += aik * bk;
            }
        }
    }
}

/// Evaluates monomials for one draw of `E`, reusing scratch space.
struct Evaluator<'a> {
    identity: Identity,
    operands: &'a [Matrix],
    n1: usize,
    n2: usize,
    et: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(identity: Identity, operands: &'a [Matrix], n1: usize, n2: usize) -> Self {
        Self {
            identity,
            operands,
            n1,
            n2,
            et: vec![0.0; n1 * n2],
            x: Vec::new(),
            y: Vec::new(),
        }
    }

    /// Multiplies a chain `F₀ F₁ ⋯` where each factor is an operand index or
    /// the noise matrix (transposed or not). Result lands in `self.x`.
    fn chain(&mut self, e: &[f64], factors: &[Factor]) -> (usize, usize) {
        let (n1, n2) = (self.n1, self.n2);
        let mut shape = (0, 0);
        for (idx, f) in factors.iter().enumerate() {
            let (data, rows, cols): (&[f64], usize, usize) = match *f {
                Factor::E => (e, n1, n2),
                Factor::Et => (&self.et, n2, n1),
                Factor::Op(i) => {
                    let m = &self.operands[i];
                    (m.as_slice(), m.rows(), m.cols())
                }
            };
            if idx == 0 {
                self.x.clear();
                self.x.extend_from_slice(data);
                shape = (rows, cols);
            } else {
                mul_into(&self.x, shape.0, shape.1, data, cols, &mut self.y);
                std::mem::swap(&mut self.x, &mut self.y);
                shape = (shape.0, cols);
            }
        }
        shape
    }

    fn eval(&mut self, e: &[f64]) -> &[f64] {
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                self.et[j * self.n1 + i] = e[i * self.n2 + j];
            }
        }
        use Factor::*;
        match self.identity {
            Identity::Eae => {
                self.chain(e, &[E, Op(0), E]);
            }
            Identity::EaeT => {
                self.chain(e, &[E, Op(0), Et]);
            }
            Identity::TrEae => {
                let (r, _) = self.chain(e, &[E, Op(0)]);
                let tr: f64 = (0..r).map(|i| self.x[i * r + i]).sum();
                self.x.clear();
                self.x.extend(e.iter().map(|v| tr * v));
            }
            Identity::Odd5 => {
                self.chain(e, &[E, Op(0), E, Op(0), E]);
            }
            Identity::Deg4(_) => {
                let p = self.identity.pattern().expect("validated");
                let x = |t: bool| if t { Et } else { E };
                self.chain(e, &[x(p[0]), Op(0), x(p[1]), Op(1), x(p[2]), Op(2), x(p[3])]);
            }
        }
        &self.x
    }
}

#[derive(Clone, Copy)]
enum Factor {
    E,
    Et,
    Op(usize),
}

/// Running mean and sum of squared deviations, entrywise.
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self {
            count: 0.0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.count += 1.0;
        for ((m, s), v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m += delta / self.count;
            *s += delta * (v - *m);
        }
    }

    fn merge(&mut self, other: &Moments) {
        let total = self.count + other.count;
        if other.count == 0.0 {
            return;
        }
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * other.count / total;
            self.m2[i] += other.m2[i] + delta * delta * self.count * other.count / total;
        }
        self.count = total;
    }
}

/// Averages the monomial over `samples` independent draws of `E` and compares
/// with the closed form. Batches of [`BATCH`] draws use their own derived
/// streams and are merged in batch order.
pub fn mc_verify(
    identity: Identity,
    operands: &[Matrix],
    sigma: f64,
    n1: usize,
    n2: usize,
    samples: usize,
    seed: u64,
) -> Result<MomentReport> {
    if samples < MIN_SAMPLES {
        return Err(JiveError::InvalidConfig(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(JiveError::InvalidConfig(format!(
            "sigma = {sigma} must be finite and nonnegative"
        )));
    }
    let exact = closed_form(identity, operands, sigma, n1, n2)?;
    let len = exact.rows() * exact.cols();
    let batches = samples.div_ceil(BATCH);
    let partial = map_indexed(batches, |bi| {
        let count = BATCH.min(samples - bi * BATCH);
        let mut stream = Stream::derived(seed, &[rng::STREAM_MOMENTS, bi as u64]);
        let mut eval = Evaluator::new(identity, operands, n1, n2);
        let mut e = vec![0.0; n1 * n2];
        let mut acc = Moments::new(len);
        for _ in 0..count {
            stream.fill_normal(&mut e, sigma);
            acc.push(eval.eval(&e));
        }
        acc
    });
    let mut total = Moments::new(len);
    for p in &partial {
        total.merge(p);
    }
    let n = total.count;
    let max_std_err = total.m2.iter().map(|s| (s / (n - 1.0) / n).sqrt()).fold(0.0, f64::max);
    let mc_estimate = Matrix::new(exact.rows(), exact.cols(), total.mean)?;
    let max_abs_dev = mc_estimate.max_abs_diff(&exact)?;
    Ok(MomentReport {
        identity,
        closed_form: exact,
        mc_estimate,
        max_abs_dev,
        max_std_err,
        samples,
    })
}
