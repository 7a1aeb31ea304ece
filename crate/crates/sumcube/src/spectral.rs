//! Certified spectral data for the incidence matrix: eigenvalue
//! enclosures, the four row functionals of the inverse eigenvector
//! matrix, and a verified lower bound on the smallest eigenvalue of
//! the functionals' Gram matrix.
//!
//! The two real eigenvalues are certified by an interval Newton
//! contraction test on the integer characteristic polynomial; the
//! complex pair then follows exactly from the root sum and product.
//! Eigenvectors come from adjugate columns/rows of M − λI evaluated in
//! ball arithmetic (the adjugate of a rank-3 matrix consists of exact
//! null vectors), and every functional is re-certified against the
//! eigen-identity residual.

use crate::ball::{Ball, BallCmp, CBall};
use crate::word::{IncidenceMatrix, Morphism, Vec4};
use crate::Error;

/// Coefficients of X⁴ − X³ − 2X² + 2X − 1, ascending.
pub const CHAR_POLY: [i64; 5] = [-1, 2, -2, -1, 1];

/// Derivative coefficients, ascending.
const CHAR_POLY_D: [i64; 4] = [2, -4, -3, 4];

fn eval_int_poly(coeffs: &[i64], x: Ball) -> Ball {
    let mut acc = Ball::ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * x + Ball::from_int(c);
    }
    acc
}

fn eval_int_poly_c(coeffs: &[i64], z: CBall) -> CBall {
    let mut acc = CBall::ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * z + CBall::from_real(Ball::from_int(c));
    }
    acc
}

/// Decisive sign of a ball, if any.
fn sign(b: &Ball) -> Option<i32> {
    if b.lo() > 0.0 {
        Some(1)
    } else if b.hi() < 0.0 {
        Some(-1)
    } else {
        None
    }
}

/// Certify the unique root of [`CHAR_POLY`] inside (lo, hi).
///
/// Bisection narrows the decisively sign-changing bracket, then interval
/// Newton iterations must contract into the interior at least once, which
/// certifies existence and uniqueness before the enclosure is tightened
/// to fixed point.
fn certify_real_root(mut lo: f64, mut hi: f64) -> Result<Ball, Error> {
    let p = |x: Ball| eval_int_poly(&CHAR_POLY, x);
    let dp = |x: Ball| eval_int_poly(&CHAR_POLY_D, x);

    let s_lo = sign(&p(Ball::exact(lo))).ok_or_else(|| Error::Undecided {
        context: format!("sign of characteristic polynomial at {lo}"),
    })?;
    let s_hi = sign(&p(Ball::exact(hi))).ok_or_else(|| Error::Undecided {
        context: format!("sign of characteristic polynomial at {hi}"),
    })?;
    if s_lo * s_hi >= 0 {
        return Err(Error::NoBracket { lo, hi });
    }

    while hi - lo > 1e-4 {
        let m = 0.5 * (lo + hi);
        match sign(&p(Ball::exact(m))) {
            Some(s) if s == s_lo => lo = m,
            Some(_) => hi = m,
            None => break, // close enough for Newton to take over
        }
    }

    let mut x = Ball::from_interval(lo, hi);
    let mut contracted = false;
    for _ in 0..64 {
        let m = Ball::exact(x.mid());
        let d = dp(x);
        if d.contains_zero() {
            return Err(Error::NoContraction {
                lo: x.lo(),
                hi: x.hi(),
            });
        }
        let n = m - p(m).div(&d)?;
        let new_lo = x.lo().max(n.lo());
        let new_hi = x.hi().min(n.hi());
        if new_lo > new_hi {
            return Err(Error::NoContraction {
                lo: x.lo(),
                hi: x.hi(),
            });
        }
        if n.lo() > x.lo() && n.hi() < x.hi() {
            contracted = true;
        }
        let next = Ball::from_interval(new_lo, new_hi);
        if next.rad() >= x.rad() {
            x = next;
            break;
        }
        x = next;
    }
    if !contracted {
        return Err(Error::NoContraction {
            lo: x.lo(),
            hi: x.hi(),
        });
    }
    Ok(x)
}

type CVec4 = [CBall; 4];
type CMat4 = [CVec4; 4];

fn det3(m: [[CBall; 3]; 3]) -> CBall {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Adjugate of a 4×4 complex ball matrix: adj(A)·A = A·adj(A) = det(A)·I,
/// so for a singular A the columns are right null vectors and the rows
/// are left null vectors.
fn adjugate(a: &CMat4) -> CMat4 {
    let mut adj = [[CBall::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut minor = [[CBall::ZERO; 3]; 3];
            let (mut r, mut c);
            r = 0;
            for ii in 0..4 {
                if ii == i {
                    continue;
                }
                c = 0;
                for jj in 0..4 {
                    if jj == j {
                        continue;
                    }
                    minor[r][c] = a[ii][jj];
                    c += 1;
                }
                r += 1;
            }
            let cof = det3(minor);
            adj[j][i] = if (i + j) % 2 == 0 { cof } else { -cof };
        }
    }
    adj
}

fn dot(a: &CVec4, b: &CVec4) -> CBall {
    let mut s = CBall::ZERO;
    for i in 0..4 {
        s = s + a[i] * b[i];
    }
    s
}

fn norm_sq(v: &CVec4) -> Ball {
    let mut s = Ball::ZERO;
    for z in v {
        s = s + z.abs_sq();
    }
    s
}

/// Certified eigenvalue and functional data for the incidence matrix.
pub struct SpectralData {
    pub matrix: IncidenceMatrix,
    /// λ₁ real > 1, λ₂ real < −1, λ₃ in the upper half plane, λ₄ = conj λ₃.
    pub lambda: [CBall; 4],
    /// tau[j][i] = τ_{j+1}(eᵢ): rows of the inverse eigenvector matrix,
    /// normalized so the eigenvector columns have unit Euclidean norm and
    /// real positive first entry.
    pub tau: [CVec4; 4],
    /// Unit eigenvector columns under the same normalization.
    pub q_columns: [CVec4; 4],
    /// Certified enclosure of the least eigenvalue of τ*τ.
    pub mu_min: Ball,
}

impl SpectralData {
    pub fn compute() -> Result<SpectralData, Error> {
        let matrix = Morphism::canonical().incidence_matrix();
        verify_cayley_hamilton(&matrix);

        let lambda = certified_eigenvalues()?;
        let mut tau = [[CBall::ZERO; 4]; 4];
        let mut q_columns = [[CBall::ZERO; 4]; 4];
        for j in 0..4 {
            let (t, q) = functional_for(&matrix, lambda[j])?;
            tau[j] = t;
            q_columns[j] = q;
        }
        check_residuals(&matrix, &lambda, &tau)?;
        check_biorthogonality(&tau, &q_columns)?;
        let mu_min = gram_min_eigenvalue(&tau)?;

        Ok(SpectralData {
            matrix,
            lambda,
            tau,
            q_columns,
            mu_min,
        })
    }

    /// τⱼ(x) for j ∈ 1..=4 applied to an integer vector.
    pub fn tau(&self, j: usize, x: &Vec4) -> CBall {
        assert!((1..=4).contains(&j), "tau index must be 1..=4");
        let row = &self.tau[j - 1];
        let mut s = CBall::ZERO;
        for i in 0..4 {
            s = s + row[i].scale(Ball::from_int(x.0[i]));
        }
        s
    }

    /// |τⱼ(x)|.
    pub fn tau_abs(&self, j: usize, x: &Vec4) -> Ball {
        self.tau(j, x).magnitude()
    }
}

fn verify_cayley_hamilton(m: &IncidenceMatrix) {
    // Integer check that the hard-coded polynomial annihilates M.
    let mut acc = [[0i64; 4]; 4];
    for d in (0..CHAR_POLY.len()).rev() {
        let mut next = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0;
                for k in 0..4 {
                    s += acc[i][k] * m.0[k][j];
                }
                next[i][j] = s;
            }
            next[i][i] += CHAR_POLY[d];
        }
        acc = next;
    }
    assert_eq!(acc, [[0i64; 4]; 4], "characteristic polynomial mismatch");
}

/// Enclosures of the four roots of the characteristic polynomial, in the
/// crate's fixed order.
pub fn certified_eigenvalues() -> Result<[CBall; 4], Error> {
    let l1 = certify_real_root(1.0, 2.0)?;
    let l2 = certify_real_root(-2.0, -1.0)?;

    // Root sum is 1 and root product is −1, so the complex pair is
    // determined exactly by the real pair.
    let re = (Ball::ONE - l1 - l2) * Ball::exact(0.5);
    let mod_sq = (-Ball::ONE).div(&(l1 * l2))?;
    let im = (mod_sq - re * re).sqrt_nonneg()?;

    let lambda = [
        CBall::from_real(l1),
        CBall::from_real(l2),
        CBall::new(re, im),
        CBall::new(re, -im),
    ];

    for (k, l) in lambda.iter().enumerate() {
        let budget = 1e-10;
        let rad = l.re.rad().max(l.im.rad());
        if rad > budget {
            return Err(Error::PrecisionExceeded {
                what: format!("eigenvalue {} radius", k + 1),
                radius: rad,
                budget,
            });
        }
        if !eval_int_poly_c(&CHAR_POLY, *l).contains_zero() {
            return Err(Error::PrecisionExceeded {
                what: format!("eigenvalue {} residual", k + 1),
                radius: rad,
                budget,
            });
        }
    }
    if lambda[0].re.compare(&Ball::ONE) != BallCmp::Greater
        || lambda[1].re.compare(&(-Ball::ONE)) != BallCmp::Less
        || sign(&lambda[2].im) != Some(1)
    {
        return Err(Error::Undecided {
            context: "eigenvalue ordering".into(),
        });
    }
    Ok(lambda)
}

/// Unit right eigenvector (first entry real positive) and the matching
/// row functional for one eigenvalue.
fn functional_for(m: &IncidenceMatrix, lambda: CBall) -> Result<(CVec4, CVec4), Error> {
    let mut a = [[CBall::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = CBall::from_real(Ball::from_int(m.0[i][j]));
        }
        a[i][i] = a[i][i] - lambda;
    }
    let adj = adjugate(&a);

    // Strongest column as right null vector, strongest row as left.
    let col = (0..4)
        .max_by(|&x, &y| {
            let nx: f64 = (0..4).map(|i| adj[i][x].abs_sq().mid()).sum();
            let ny: f64 = (0..4).map(|i| adj[i][y].abs_sq().mid()).sum();
            nx.total_cmp(&ny)
        })
        .unwrap();
    let row = (0..4)
        .max_by(|&x, &y| norm_sq(&adj[x]).mid().total_cmp(&norm_sq(&adj[y]).mid()))
        .unwrap();

    let mut v = [CBall::ZERO; 4];
    for i in 0..4 {
        v[i] = adj[i][col];
    }
    let w = adj[row];

    // Normalize v to unit length, then rotate the phase so the first
    // entry is real positive; that pins the magnitudes of the
    // functionals uniquely.
    let inv_norm = norm_sq(&v).sqrt_nonneg()?.recip()?;
    let mut u = [CBall::ZERO; 4];
    for i in 0..4 {
        u[i] = v[i].scale(inv_norm);
    }
    let mag0 = u[0].magnitude();
    if mag0.contains_zero() {
        return Err(Error::Undecided {
            context: "eigenvector first entry magnitude".into(),
        });
    }
    let inv_mag0 = mag0.recip()?;
    let phase = u[0].conj().scale(inv_mag0);
    let mut q = [CBall::ZERO; 4];
    for i in 0..4 {
        q[i] = u[i] * phase;
    }
    if sign(&q[0].re) != Some(1) || !q[0].im.contains_zero() {
        return Err(Error::Undecided {
            context: "eigenvector phase normalization".into(),
        });
    }

    // The functional is the left null vector scaled so τ(q) = 1.
    let d = dot(&w, &q);
    let mut t = [CBall::ZERO; 4];
    for i in 0..4 {
        t[i] = w[i].div(&d)?;
    }
    Ok((t, q))
}

fn check_residuals(
    m: &IncidenceMatrix,
    lambda: &[CBall; 4],
    tau: &[CVec4; 4],
) -> Result<(), Error> {
    let budget = 1e-8;
    for j in 0..4 {
        for i in 0..4 {
            let col = Vec4::new(m.0[0][i], m.0[1][i], m.0[2][i], m.0[3][i]);
            let mut lhs = CBall::ZERO;
            for k in 0..4 {
                lhs = lhs + tau[j][k].scale(Ball::from_int(col.0[k]));
            }
            let r = lhs - lambda[j] * tau[j][i];
            let rad = r.re.rad().max(r.im.rad());
            if !r.contains_zero() || rad > budget {
                return Err(Error::PrecisionExceeded {
                    what: format!("eigen-identity residual tau_{} e_{}", j + 1, i),
                    radius: rad,
                    budget,
                });
            }
        }
    }
    Ok(())
}

fn check_biorthogonality(tau: &[CVec4; 4], q: &[CVec4; 4]) -> Result<(), Error> {
    for j in 0..4 {
        for i in 0..4 {
            let p = dot(&tau[j], &q[i]);
            let expect = if i == j { 1.0 } else { 0.0 };
            if !(p.re.contains(expect) && p.im.contains_zero()) {
                return Err(Error::PrecisionExceeded {
                    what: format!("biorthogonality tau_{} q_{}", j + 1, i + 1),
                    radius: p.re.rad(),
                    budget: 0.0,
                });
            }
        }
    }
    Ok(())
}

const N8: usize = 8;
type Mat8 = [[f64; N8]; N8];
type BMat8 = [[Ball; N8]; N8];

/// Cyclic Jacobi diagonalization of a symmetric matrix; returns the
/// accumulated rotation matrix (approximate eigenvectors as columns).
fn jacobi_sym8(mut a: Mat8) -> Mat8 {
    let mut v = [[0.0; N8]; N8];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..32 {
        let off: f64 = (0..N8)
            .flat_map(|i| (0..N8).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..N8 {
            for q in (p + 1)..N8 {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N8 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N8 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..N8 {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    v
}

/// Rigorous Gauss–Jordan inverse of an exactly-known float matrix.
fn ball_inverse8(m: &Mat8) -> Result<BMat8, Error> {
    let mut a: BMat8 = [[Ball::ZERO; N8]; N8];
    let mut inv: BMat8 = [[Ball::ZERO; N8]; N8];
    for i in 0..N8 {
        for j in 0..N8 {
            a[i][j] = Ball::exact(m[i][j]);
        }
        inv[i][i] = Ball::ONE;
    }
    for col in 0..N8 {
        let pivot = (col..N8)
            .max_by(|&x, &y| a[x][col].mid().abs().total_cmp(&a[y][col].mid().abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        if p.contains_zero() {
            return Err(Error::DivisorContainsZero);
        }
        let pinv = p.recip()?;
        for j in 0..N8 {
            a[col][j] = a[col][j] * pinv;
            inv[col][j] = inv[col][j] * pinv;
        }
        for i in 0..N8 {
            if i == col {
                continue;
            }
            let f = a[i][col];
            for j in 0..N8 {
                a[i][j] = a[i][j] - f * a[col][j];
                inv[i][j] = inv[i][j] - f * inv[col][j];
            }
        }
    }
    Ok(inv)
}

fn mat_mul8(a: &BMat8, b: &BMat8) -> BMat8 {
    let mut out = [[Ball::ZERO; N8]; N8];
    for i in 0..N8 {
        for j in 0..N8 {
            let mut s = Ball::ZERO;
            for (k, bk) in b.iter().enumerate() {
                s = s + a[i][k] * bk[j];
            }
            out[i][j] = s;
        }
    }
    out
}

/// Certified enclosure of the least eigenvalue of τ*τ.
///
/// The Hermitian Gram matrix is embedded as the real symmetric 8×8
/// [[Re, −Im], [Im, Re]] (same spectrum, doubled), conjugated by a
/// floating-point Jacobi eigenbasis through a rigorously enclosed
/// inverse, and bounded by Gershgorin discs of the nearly diagonal
/// result. Disc clusters locate every eigenvalue, so the lowest cluster
/// brackets the minimum.
fn gram_min_eigenvalue(tau: &[CVec4; 4]) -> Result<Ball, Error> {
    // H = τ*τ.
    let mut h = [[CBall::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = CBall::ZERO;
            for t in tau {
                s = s + t[i].conj() * t[j];
            }
            h[i][j] = s;
        }
    }

    let mut e: BMat8 = [[Ball::ZERO; N8]; N8];
    for i in 0..4 {
        for j in 0..4 {
            e[i][j] = h[i][j].re;
            e[i + 4][j + 4] = h[i][j].re;
            e[i][j + 4] = -h[i][j].im;
            e[i + 4][j] = h[i][j].im;
        }
    }

    let mut mid: Mat8 = [[0.0; N8]; N8];
    for i in 0..N8 {
        for j in 0..N8 {
            // Symmetrize midpoints so Jacobi sees exact symmetry.
            mid[i][j] = 0.5 * (e[i][j].mid() + e[j][i].mid());
        }
    }
    let v = jacobi_sym8(mid);
    let vinv = ball_inverse8(&v)?;
    let mut vb: BMat8 = [[Ball::ZERO; N8]; N8];
    for i in 0..N8 {
        for j in 0..N8 {
            vb[i][j] = Ball::exact(v[i][j]);
        }
    }
    let t = mat_mul8(&vinv, &mat_mul8(&e, &vb));

    // Gershgorin discs of the nearly diagonal similar matrix.
    let mut discs: Vec<(f64, f64)> = (0..N8)
        .map(|i| {
            let mut r = Ball::ZERO;
            for j in 0..N8 {
                if j != i {
                    r = r + t[i][j].abs();
                }
            }
            ((t[i][i] - r).lo(), (t[i][i] + r).hi())
        })
        .collect();
    discs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Merge overlapping discs; each connected cluster contains exactly
    // as many eigenvalues as discs, so the lowest cluster brackets the
    // smallest eigenvalue.
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    for d in discs {
        match clusters.last_mut() {
            Some(last) if d.0 <= last.1 => last.1 = last.1.max(d.1),
            _ => clusters.push(d),
        }
    }
    if clusters.iter().any(|c| c.0 <= 0.0) {
        return Err(Error::Undecided {
            context: "positivity of the functional Gram matrix".into(),
        });
    }
    let lowest = clusters[0];
    let mu = Ball::from_interval(lowest.0, lowest.1);
    let budget = 1e-4;
    if mu.rad() > budget {
        return Err(Error::PrecisionExceeded {
            what: "least Gram eigenvalue enclosure".into(),
            radius: mu.rad(),
            budget,
        });
    }
    Ok(mu)
}
