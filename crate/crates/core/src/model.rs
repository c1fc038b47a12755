//! JIVE instance generation.
//!
//! Each clean matrix is `A_k⋆ = U⋆V_kᵀ + U_kW_kᵀ` with the shared basis `U⋆`
//! orthogonal to every unique basis `U_k`, and the observation adds i.i.d.
//! Gaussian noise. All randomness is drawn from streams derived from the
//! configuration seed (see [`crate::rng`]), so a `(config, seed)` pair
//! determines the dataset bit for bit.
//!
//! Random orthonormal draws fill an `n x k` matrix with standard normals,
//! project out any forbidden span (twice, for numerical safety) and take the
//! thin-QR factor with a nonnegative `R` diagonal. A numerically rank
//! deficient draw is discarded and redrawn from the same stream.

use std::fmt;
use std::str::FromStr;

use crate::error::{JiveError, Result};
use crate::matrixkit::{project_out, qr_orthonormalize, singular_values, Matrix, OrthonormalBasis};
use crate::metrics::misalignment;
use crate::par::try_map_indexed;
use crate::rng::{self, derive_seed, Stream};

/// How the unique subspaces are spread out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MisalignScheme {
    /// `U_k = √(1-θ) Z + √θ Z_k` with fresh `Z_k` per matrix; misalignment is
    /// only approximately `θ`.
    Randomized,
    /// `U_k = √(1-θ) Z₂ ± √θ Z₃`, alternating signs; misalignment is exactly
    /// `θ` for `θ ≤ 1/2` and even `K`.
    TwoGroup,
}

/// How loadings are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LoadingScheme {
    /// Fresh orthonormal `V_k` and `γ`-scaled orthonormal `W_k` per matrix.
    Random,
    /// One `V` and one `W` shared by all matrices.
    Shared,
    /// `W = 0.6 V + 0.8 Z₁` shared by all matrices, so `VᵀW = 0.6 I` and
    /// `σ_min = √0.4`. Needs `r = r_k`; `γ` is ignored.
    OracleHard,
}

impl fmt::Display for MisalignScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MisalignScheme::Randomized => "randomized",
            MisalignScheme::TwoGroup => "two-group",
        })
    }
}

impl FromStr for MisalignScheme {
    type Err = JiveError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "randomized" => Ok(MisalignScheme::Randomized),
            "two-group" => Ok(MisalignScheme::TwoGroup),
            other => Err(JiveError::Parse(format!("unknown misalignment scheme `{other}`"))),
        }
    }
}

impl fmt::Display for LoadingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LoadingScheme::Random => "random",
            LoadingScheme::Shared => "shared",
            LoadingScheme::OracleHard => "oracle-hard",
        })
    }
}

impl FromStr for LoadingScheme {
    type Err = JiveError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(LoadingScheme::Random),
            "shared" => Ok(LoadingScheme::Shared),
            "oracle-hard" => Ok(LoadingScheme::OracleHard),
            other => Err(JiveError::Parse(format!("unknown loading scheme `{other}`"))),
        }
    }
}

/// Parameters of a synthetic JIVE instance. `num_matrices` is K.
#[derive(Clone, Debug, PartialEq)]
pub struct JiveConfig {
    pub n: usize,
    pub d: usize,
    pub num_matrices: usize,
    pub r: usize,
    pub r_k: usize,
    pub theta: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub misalign_scheme: MisalignScheme,
    pub loading_scheme: LoadingScheme,
    pub seed: u64,
}

impl Default for JiveConfig {
    fn default() -> Self {
        Self {
            n: 20,
            d: 20,
            num_matrices: 100,
            r: 2,
            r_k: 2,
            theta: 0.5,
            sigma: 1e-3,
            gamma: 0.5,
            misalign_scheme: MisalignScheme::Randomized,
            loading_scheme: LoadingScheme::Random,
            seed: 0,
        }
    }
}

impl JiveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(JiveError::InvalidConfig(msg));
        if self.n == 0 || self.d == 0 || self.num_matrices == 0 || self.r == 0 || self.r_k == 0 {
            return bad("n, d, K, r and r_k must all be at least 1".into());
        }
        if self.r + self.r_k > self.n.min(self.d) {
            return bad(format!(
                "r + r_k = {} exceeds min(n, d) = {}",
                self.r + self.r_k,
                self.n.min(self.d)
            ));
        }
        if self.theta == 0.0 {
            return Err(JiveError::ZeroMisalignment);
        }
        let theta_max = 1.0 - 1.0 / self.num_matrices as f64;
        if !(self.theta > 0.0 && self.theta <= theta_max + 1e-12) {
            return bad(format!("theta = {} is outside (0, {theta_max}]", self.theta));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma = {} must be finite and nonnegative", self.sigma));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma = {} must be finite and positive", self.gamma));
        }
        let needed = self.r + 2 * self.r_k;
        if needed > self.n {
            return Err(JiveError::DimensionOverflow {
                requested: needed,
                available: self.n,
            });
        }
        if self.misalign_scheme == MisalignScheme::TwoGroup {
            if self.num_matrices % 2 == 1 {
                return Err(JiveError::OddK(self.num_matrices));
            }
            if self.theta > 0.5 {
                return Err(JiveError::SchemeConstraint(format!(
                    "two-group misalignment needs theta <= 1/2, got {}",
                    self.theta
                )));
            }
        }
        if self.loading_scheme == LoadingScheme::OracleHard && (self.r != self.r_k || 2 * self.r > self.d) {
            return Err(JiveError::SchemeConstraint(format!(
                "oracle-hard loadings need r = r_k and 2r <= d (r = {}, r_k = {}, d = {})",
                self.r, self.r_k, self.d
            )));
        }
        Ok(())
    }
}

/// The full parameterisation of a clean instance.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub u_star: OrthonormalBasis,
    pub u_k: Vec<OrthonormalBasis>,
    pub v_k: Vec<Matrix>,
    pub w_k: Vec<Matrix>,
    pub a_star: Vec<Matrix>,
    /// `1 - ‖(1/K) Σ U_kU_kᵀ‖`, recomputed from `u_k`.
    pub measured_theta: f64,
    /// `min_k σ_{r+r_k}(A_k⋆)`.
    pub sigma_min: f64,
    /// `max_k σ₁(A_k⋆)`.
    pub sigma_max: f64,
    /// `σ_max / σ_min`; infinite when `σ_min = 0`, 1 for an all-zero instance.
    pub kappa: f64,
    /// Set when a rank, orthogonality or misalignment condition fails.
    pub identifiability_violated: bool,
}

/// Observed matrices together with how they were produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub a: Vec<Matrix>,
    pub config: Option<JiveConfig>,
    pub truth: Option<GroundTruth>,
}

impl Dataset {
    /// Wraps externally supplied matrices, which must be nonempty and share
    /// one shape.
    pub fn from_matrices(a: Vec<Matrix>) -> Result<Self> {
        let first = a.first().ok_or(JiveError::EmptyList)?;
        let shape = first.shape();
        if let Some((k, m)) = a.iter().enumerate().find(|(_, m)| m.shape() != shape) {
            return Err(JiveError::DimensionMismatch(format!(
                "matrix {k} is {}x{} but matrix 0 is {}x{}",
                m.rows(),
                m.cols(),
                shape.0,
                shape.1
            )));
        }
        Ok(Self {
            a,
            config: None,
            truth: None,
        })
    }

    pub fn n(&self) -> usize {
        self.a[0].rows()
    }

    pub fn d(&self) -> usize {
        self.a[0].cols()
    }

    pub fn num_matrices(&self) -> usize {
        self.a.len()
    }
}

/// Random `n x k` orthonormal basis orthogonal to every basis in
/// `orthogonal_to`, which are assumed mutually orthogonal.
pub fn gen_orthonormal(seed: u64, n: usize, k: usize, orthogonal_to: &[&OrthonormalBasis]) -> Result<OrthonormalBasis> {
    let taken: usize = orthogonal_to.iter().map(|b| b.dim()).sum();
    if k + taken > n {
        return Err(JiveError::DimensionOverflow {
            requested: k + taken,
            available: n,
        });
    }
    for b in orthogonal_to {
        if b.ambient_dim() != n {
            return Err(JiveError::DimensionMismatch(format!(
                "forbidden basis lives in R^{} but n = {n}",
                b.ambient_dim()
            )));
        }
    }
    let mut stream = Stream::new(seed);
    let mut draw = vec![0.0; n * k];
    for _ in 0..32 {
        stream.fill_normal(&mut draw, 1.0);
        let mut g = Matrix::new(n, k, draw.clone())?;
        for _ in 0..2 {
            for b in orthogonal_to {
                g = project_out(&g, b)?;
            }
        }
        match qr_orthonormalize(&g) {
            Ok(q) => return Ok(q),
            Err(JiveError::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(JiveError::NoConvergence("orthonormal sampling"))
}

fn check_theta(theta: f64) -> Result<()> {
    if theta == 0.0 {
        return Err(JiveError::ZeroMisalignment);
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(JiveError::InvalidConfig(format!("theta = {theta} is outside (0, 1]")));
    }
    Ok(())
}

fn mix(a: f64, x: &Matrix, b: f64, y: &Matrix) -> Result<OrthonormalBasis> {
    let mut m = x.scale(a);
    m.axpy(b, y)?;
    OrthonormalBasis::new(m)
}

/// Randomised unique subspaces `U_k = √(1-θ) Z + √θ Z_k` with one `Z ⊥ U⋆`
/// and per-matrix `Z_k ⊥ {U⋆, Z}`.
pub fn gen_unique_randomized(
    seed: u64,
    u_star: &OrthonormalBasis,
    theta: f64,
    num_matrices: usize,
    r_k: usize,
) -> Result<Vec<OrthonormalBasis>> {
    check_theta(theta)?;
    let n = u_star.ambient_dim();
    let z = gen_orthonormal(derive_seed(seed, &[rng::STREAM_COMMON_UNIQUE]), n, r_k, &[u_star])?;
    let (a, b) = ((1.0 - theta).sqrt(), theta.sqrt());
    try_map_indexed(num_matrices, |k| {
        let zk = gen_orthonormal(
            derive_seed(seed, &[rng::STREAM_PER_K_UNIQUE, k as u64]),
            n,
            r_k,
            &[u_star, &z],
        )?;
        mix(a, z.mat(), b, zk.mat())
    })
}

/// Two-group unique subspaces: `U₊ = √(1-θ) Z₂ + √θ Z₃` for even (0-based)
/// `k`, `U₋ = √(1-θ) Z₂ - √θ Z₃` for odd `k`. The average projector is
/// `(1-θ) Z₂Z₂ᵀ + θ Z₃Z₃ᵀ`, so the misalignment is exactly `θ`.
pub fn gen_unique_two_group(
    seed: u64,
    u_star: &OrthonormalBasis,
    theta: f64,
    num_matrices: usize,
    r_k: usize,
) -> Result<Vec<OrthonormalBasis>> {
    if num_matrices % 2 == 1 {
        return Err(JiveError::OddK(num_matrices));
    }
    check_theta(theta)?;
    if theta > 0.5 {
        return Err(JiveError::SchemeConstraint(format!(
            "two-group misalignment needs theta <= 1/2, got {theta}"
        )));
    }
    let n = u_star.ambient_dim();
    let z2 = gen_orthonormal(derive_seed(seed, &[rng::STREAM_COMMON_UNIQUE]), n, r_k, &[u_star])?;
    let z3 = gen_orthonormal(
        derive_seed(seed, &[rng::STREAM_PER_K_UNIQUE, 0]),
        n,
        r_k,
        &[u_star, &z2],
    )?;
    let (a, b) = ((1.0 - theta).sqrt(), theta.sqrt());
    let plus = mix(a, z2.mat(), b, z3.mat())?;
    let minus = mix(a, z2.mat(), -b, z3.mat())?;
    Ok((0..num_matrices)
        .map(|k| if k % 2 == 0 { plus.clone() } else { minus.clone() })
        .collect())
}

/// Loadings `(V_k, W_k)`, each `d x r` and `d x r_k`.
pub fn gen_loadings(
    seed: u64,
    scheme: LoadingScheme,
    num_matrices: usize,
    d: usize,
    r: usize,
    r_k: usize,
    gamma: f64,
) -> Result<(Vec<Matrix>, Vec<Matrix>)> {
    if r.max(r_k) > d {
        return Err(JiveError::DimensionOverflow {
            requested: r.max(r_k),
            available: d,
        });
    }
    let draw = |tag: u64, k: Option<usize>, cols: usize| {
        let path: Vec<u64> = match k {
            Some(k) => vec![tag, k as u64],
            None => vec![tag],
        };
        gen_orthonormal(derive_seed(seed, &path), d, cols, &[]).map(OrthonormalBasis::into_matrix)
    };
    match scheme {
        LoadingScheme::Random => {
            let pairs = try_map_indexed(num_matrices, |k| {
                let v = draw(rng::STREAM_LOADING_V, Some(k), r)?;
                let w = draw(rng::STREAM_LOADING_W, Some(k), r_k)?.scale(gamma);
                Ok((v, w))
            })?;
            Ok(pairs.into_iter().unzip())
        }
        LoadingScheme::Shared => {
            let v = draw(rng::STREAM_LOADING_V, None, r)?;
            let w = draw(rng::STREAM_LOADING_W, None, r_k)?.scale(gamma);
            Ok((vec![v; num_matrices], vec![w; num_matrices]))
        }
        LoadingScheme::OracleHard => {
            if r != r_k || 2 * r > d {
                return Err(JiveError::SchemeConstraint(format!(
                    "oracle-hard loadings need r = r_k and 2r <= d (r = {r}, r_k = {r_k}, d = {d})"
                )));
            }
            let v = gen_orthonormal(derive_seed(seed, &[rng::STREAM_LOADING_V]), d, r, &[])?;
            let z1 = gen_orthonormal(derive_seed(seed, &[rng::STREAM_HARD_Z1]), d, r, &[&v])?;
            let mut w = v.mat().scale(0.6);
            w.axpy(0.8, z1.mat())?;
            let v = v.into_matrix();
            Ok((vec![v; num_matrices], vec![w; num_matrices]))
        }
    }
}

/// Builds `A_k⋆ = U⋆V_kᵀ + U_kW_kᵀ` and the derived signal statistics.
pub fn assemble(
    u_star: OrthonormalBasis,
    u_k: Vec<OrthonormalBasis>,
    v_k: Vec<Matrix>,
    w_k: Vec<Matrix>,
) -> Result<GroundTruth> {
    let num = u_k.len();
    if num == 0 {
        return Err(JiveError::EmptyList);
    }
    if v_k.len() != num || w_k.len() != num {
        return Err(JiveError::DimensionMismatch(format!(
            "{num} unique bases but {} V and {} W loadings",
            v_k.len(),
            w_k.len()
        )));
    }
    let r = u_star.dim();
    let parts = try_map_indexed(num, |k| {
        let mut a = u_star.mat().matmul_t(&v_k[k])?;
        a.add_assign(&u_k[k].mat().matmul_t(&w_k[k])?)?;
        let sv = singular_values(&a)?;
        let ortho = u_k[k].mat().t_matmul(u_star.mat())?.max_abs();
        Ok((a, sv, ortho))
    })?;

    let mut sigma_min = f64::INFINITY;
    let mut sigma_max = 0.0_f64;
    let mut violated = false;
    let mut a_star = Vec::with_capacity(num);
    for (k, (a, sv, ortho)) in parts.into_iter().enumerate() {
        let rank = r + u_k[k].dim();
        let s_rank = sv.get(rank - 1).copied().unwrap_or(0.0);
        let s_next = sv.get(rank).copied().unwrap_or(0.0);
        let s1 = sv.first().copied().unwrap_or(0.0);
        sigma_min = sigma_min.min(s_rank);
        sigma_max = sigma_max.max(s1);
        violated |= s_rank < 1e-8 || s_next > 1e-8 * s1 || ortho > 1e-10;
        a_star.push(a);
    }
    let kappa = if sigma_max == 0.0 {
        1.0
    } else if sigma_min == 0.0 {
        f64::INFINITY
    } else {
        sigma_max / sigma_min
    };
    let measured_theta = misalignment(&u_k)?;
    violated |= measured_theta <= 1e-10;
    Ok(GroundTruth {
        u_star,
        u_k,
        v_k,
        w_k,
        a_star,
        measured_theta,
        sigma_min,
        sigma_max,
        kappa,
        identifiability_violated: violated,
    })
}

/// Observations `A_k = A_k⋆ + σG_k` with independent noise streams per `k`.
pub fn add_noise(seed: u64, truth: GroundTruth, sigma: f64) -> Result<Dataset> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(JiveError::InvalidConfig(format!(
            "sigma = {sigma} must be finite and nonnegative"
        )));
    }
    let a = if sigma == 0.0 {
        truth.a_star.clone()
    } else {
        crate::par::map_indexed(truth.a_star.len(), |k| {
            let clean = &truth.a_star[k];
            let mut noise = vec![0.0; clean.rows() * clean.cols()];
            Stream::derived(seed, &[rng::STREAM_NOISE, k as u64]).fill_normal(&mut noise, sigma);
            let mut out = clean.clone();
            for (o, e) in out.as_mut_slice().iter_mut().zip(noise) {
                *o += e;
            }
            out
        })
    };
    Ok(Dataset {
        a,
        config: None,
        truth: Some(truth),
    })
}

/// Draws the full instance described by `config`.
pub fn generate(config: &JiveConfig) -> Result<Dataset> {
    config.validate()?;
    let seed = config.seed;
    let u_star = gen_orthonormal(derive_seed(seed, &[rng::STREAM_SHARED]), config.n, config.r, &[])?;
    let u_k = match config.misalign_scheme {
        MisalignScheme::Randomized => {
            gen_unique_randomized(seed, &u_star, config.theta, config.num_matrices, config.r_k)?
        }
        MisalignScheme::TwoGroup => gen_unique_two_group(seed, &u_star, config.theta, config.num_matrices, config.r_k)?,
    };
    let (v_k, w_k) = gen_loadings(
        seed,
        config.loading_scheme,
        config.num_matrices,
        config.d,
        config.r,
        config.r_k,
        config.gamma,
    )?;
    let truth = assemble(u_star, u_k, v_k, w_k)?;
    let mut data = add_noise(seed, truth, config.sigma)?;
    data.config = Some(config.clone());
    Ok(data)
}

/// The two-matrix instance on which stacking fails:
/// `A₁ = e₁e₁ᵀ + ε(0,1,-1)ᵀ(1,1,1)` and `A₂ = e₁e₁ᵀ + ε(0,1,1)ᵀ(1,1,1)`.
pub fn counterexample_stacked(epsilon: f64) -> Result<Dataset> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(JiveError::InvalidConfig(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let basis = |v: &[f64]| OrthonormalBasis::new(Matrix::column(v)?);
    let u_star = basis(&[1.0, 0.0, 0.0])?;
    let u_k = vec![basis(&[0.0, h, -h])?, basis(&[0.0, h, h])?];
    let v = Matrix::column(&[1.0, 0.0, 0.0])?;
    let w_scale = epsilon * std::f64::consts::SQRT_2;
    let w = Matrix::column(&[w_scale, w_scale, w_scale])?;
    let truth = assemble(u_star, u_k, vec![v.clone(), v], vec![w.clone(), w])?;
    let config = JiveConfig {
        n: 3,
        d: 3,
        num_matrices: 2,
        r: 1,
        r_k: 1,
        theta: truth.measured_theta,
        sigma: 0.0,
        gamma: epsilon * 6f64.sqrt(),
        misalign_scheme: MisalignScheme::TwoGroup,
        loading_scheme: LoadingScheme::Shared,
        seed: 0,
    };
    // write the matrices exactly as displayed instead of through the rounded
    // 1/√2 factors of the unique bases
    let mut truth = truth;
    for (k, sign) in [(0usize, -1.0), (1, 1.0)] {
        truth.a_star[k] = Matrix::from_fn(3, 3, |i, j| {
            let shared = if i == 0 && j == 0 { 1.0 } else { 0.0 };
            let unique = match i {
                1 => epsilon,
                2 => sign * epsilon,
                _ => 0.0,
            };
            shared + unique
        });
    }
    let mut data = add_noise(0, truth, 0.0)?;
    data.config = Some(config);
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> JiveConfig {
        JiveConfig {
            num_matrices: 6,
            seed: 42,
            ..JiveConfig::default()
        }
    }

    #[test]
    fn validate_rejects() {
        let c = cfg();
        assert_eq!(
            JiveConfig {
                theta: 0.0,
                ..c.clone()
            }
            .validate(),
            Err(JiveError::ZeroMisalignment)
        );
        assert!(JiveConfig {
            theta: 0.9,
            ..c.clone()
        }
        .validate()
        .is_err());
        assert!(matches!(
            JiveConfig {
                num_matrices: 5,
                misalign_scheme: MisalignScheme::TwoGroup,
                theta: 0.3,
                ..c.clone()
            }
            .validate(),
            Err(JiveError::OddK(5))
        ));
        assert!(matches!(
            JiveConfig {
                r_k: 1,
                loading_scheme: LoadingScheme::OracleHard,
                ..c.clone()
            }
            .validate(),
            Err(JiveError::SchemeConstraint(_))
        ));
        assert!(matches!(
            JiveConfig { n: 5, ..c }.validate(),
            Err(JiveError::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn orthonormal_draws() {
        let q = gen_orthonormal(1, 3, 3, &[]).unwrap();
        assert!(q.mat().orthonormality_defect() < 1e-12);
        let e1 = OrthonormalBasis::standard(4, 1);
        let b = gen_orthonormal(2, 4, 1, &[&e1]).unwrap();
        assert!(b.mat()[(0, 0)].abs() < 1e-12);
        assert_eq!(
            gen_orthonormal(9, 6, 2, &[]).unwrap(),
            gen_orthonormal(9, 6, 2, &[]).unwrap()
        );
        assert!(matches!(
            gen_orthonormal(2, 4, 4, &[&e1]),
            Err(JiveError::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn two_group_is_exact() {
        let u_star = gen_orthonormal(3, 10, 2, &[]).unwrap();
        let u = gen_unique_two_group(5, &u_star, 0.3, 4, 2).unwrap();
        assert!((misalignment(&u).unwrap() - 0.3).abs() < 1e-12);
        let cross = u[0].mat().t_matmul(u[1].mat()).unwrap();
        assert!(cross.max_abs_diff(&Matrix::identity(2).scale(0.4)).unwrap() < 1e-12);
        assert!(matches!(
            gen_unique_two_group(5, &u_star, 0.3, 3, 2),
            Err(JiveError::OddK(3))
        ));
    }

    #[test]
    fn generated_instance_is_identifiable_and_replayable() {
        for scheme in [LoadingScheme::Random, LoadingScheme::Shared, LoadingScheme::OracleHard] {
            let c = JiveConfig {
                loading_scheme: scheme,
                ..cfg()
            };
            let data = generate(&c).unwrap();
            let truth = data.truth.as_ref().unwrap();
            assert!(!truth.identifiability_violated, "{scheme}");
            assert!(truth.kappa >= 1.0);
            assert_eq!(data, generate(&c).unwrap());
        }
    }

    #[test]
    fn oracle_hard_geometry() {
        let (v, w) = gen_loadings(4, LoadingScheme::OracleHard, 3, 20, 2, 2, 0.5).unwrap();
        let vw = v[0].t_matmul(&w[0]).unwrap();
        assert!(vw.max_abs_diff(&Matrix::identity(2).scale(0.6)).unwrap() < 1e-12);
        let c = JiveConfig {
            loading_scheme: LoadingScheme::OracleHard,
            ..cfg()
        };
        let truth = generate(&c).unwrap().truth.unwrap();
        assert!((truth.sigma_min - 0.4f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_loadings_are_flagged() {
        let u_star = OrthonormalBasis::standard(4, 1);
        let u1 = gen_orthonormal(1, 4, 1, &[&u_star]).unwrap();
        let truth = assemble(u_star, vec![u1], vec![Matrix::zeros(3, 1)], vec![Matrix::zeros(3, 1)]).unwrap();
        assert!(truth.identifiability_violated);
        assert_eq!(truth.a_star[0].max_abs(), 0.0);
        assert_eq!(truth.kappa, 1.0);
    }

    #[test]
    fn noise_free_copy() {
        let data = generate(&JiveConfig { sigma: 0.0, ..cfg() }).unwrap();
        assert_eq!(&data.a, &data.truth.unwrap().a_star);
    }
}
