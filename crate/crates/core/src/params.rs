//! Balanced parameter sets: the sextuple `b₁⋯b₆ = q` behind the Rahman
//! functional and the triple pair `a₁a₂a₃b₁b₂b₃ = q` behind the bilateral
//! q-Saalschütz sum and the Al-Salam–Ismail functional.

use crate::error::{QsvError, Result};
use crate::numeric::{abs, inv, Real, C};
use crate::qcore::{GenericityCertificate, QContext};

fn check_product<R: Real>(ctx: &QContext<R>, prod: C<R>, what: &str) -> Result<()> {
    let err = abs(prod - ctx.q()) / abs(ctx.q());
    if err > ctx.constraint_tol() {
        return Err(QsvError::ConstraintViolated(format!(
            "{what} differs from q by relative {:e}",
            err.to_f64()
        )));
    }
    Ok(())
}

/// `b₁, …, b₆` with `b₁⋯b₆ = q`.
#[derive(Clone, Debug)]
pub struct RahmanParams<R: Real> {
    b: [C<R>; 6],
    certificate: GenericityCertificate,
}

impl<R: Real> RahmanParams<R> {
    /// Balanced and generic; non-generic draws are `DegenerateDraw`.
    pub fn new(ctx: &QContext<R>, b: [C<R>; 6]) -> Result<Self> {
        let p = Self::balanced(ctx, b)?;
        if !p.certificate.is_generic(ctx.genericity_threshold) {
            return Err(QsvError::DegenerateDraw(format!(
                "lattice distance {:e} below threshold",
                p.certificate.min_lattice_distance
            )));
        }
        Ok(p)
    }

    /// Balanced only. Special points (b_i = b_j and the like) are legitimate
    /// inputs for several identities; the certificate still records them.
    pub fn balanced(ctx: &QContext<R>, b: [C<R>; 6]) -> Result<Self> {
        check_product(ctx, b.iter().fold(crate::numeric::one(), |p, &x| p * x), "b1...b6")?;
        let mut vals = Vec::with_capacity(36);
        for i in 0..6 {
            for j in i..6 {
                if i < j {
                    vals.push(b[i] * inv(b[j]));
                }
                vals.push(b[i] * b[j]);
            }
        }
        let certificate = GenericityCertificate::from_values(ctx, vals);
        Ok(Self { b, certificate })
    }

    /// Sets `b₆ = q/(b₁⋯b₅)`.
    pub fn completing(ctx: &QContext<R>, b: [C<R>; 5]) -> Result<Self> {
        let p = b.iter().fold(crate::numeric::one(), |p, &x| p * x);
        let b6 = ctx.q() * inv(p);
        Self::balanced(ctx, [b[0], b[1], b[2], b[3], b[4], b6])
    }

    #[inline]
    pub fn b(&self) -> &[C<R>; 6] {
        &self.b
    }

    pub fn certificate(&self) -> GenericityCertificate {
        self.certificate
    }

    /// `(b_{σ(1)}, …, b_{σ(6)})`.
    pub fn permuted(&self, ctx: &QContext<R>, perm: [usize; 6]) -> Result<Self> {
        Self::balanced(ctx, perm.map(|i| self.b[i]))
    }

    /// `b_j q^{k_j}` with `Σ k_j = 0`.
    pub fn shifted(&self, ctx: &QContext<R>, k: [i64; 6]) -> Result<Self> {
        if k.iter().sum::<i64>() != 0 {
            return Err(QsvError::InvalidIndex("shifts must sum to zero".into()));
        }
        let mut b = self.b;
        for j in 0..6 {
            b[j] = b[j] * ctx.qpow(k[j]);
        }
        Self::balanced(ctx, b)
    }
}

/// `a₁, a₂, a₃, b₁, b₂, b₃` with `a₁a₂a₃b₁b₂b₃ = q`.
#[derive(Clone, Debug)]
pub struct TriplePairParams<R: Real> {
    a: [C<R>; 3],
    b: [C<R>; 3],
    certificate: GenericityCertificate,
}

/// Parameters of the bilateral q-Saalschütz summation.
pub type SaalschutzParams<R> = TriplePairParams<R>;
/// Parameters of the Al-Salam–Ismail functional.
pub type AsiParams<R> = TriplePairParams<R>;

impl<R: Real> TriplePairParams<R> {
    pub fn new(ctx: &QContext<R>, a: [C<R>; 3], b: [C<R>; 3]) -> Result<Self> {
        let p = Self::balanced(ctx, a, b)?;
        if !p.certificate.is_generic(ctx.genericity_threshold) {
            return Err(QsvError::DegenerateDraw(format!(
                "lattice distance {:e} below threshold",
                p.certificate.min_lattice_distance
            )));
        }
        Ok(p)
    }

    pub fn balanced(ctx: &QContext<R>, a: [C<R>; 3], b: [C<R>; 3]) -> Result<Self> {
        let prod = a[0] * a[1] * a[2] * b[0] * b[1] * b[2];
        check_product(ctx, prod, "a1a2a3b1b2b3")?;
        let mut vals = Vec::with_capacity(15);
        for i in 0..3 {
            for j in 0..3 {
                if i < j {
                    vals.push(a[i] * inv(a[j]));
                    vals.push(b[i] * inv(b[j]));
                }
                vals.push(a[i] * b[j]);
            }
        }
        let certificate = GenericityCertificate::from_values(ctx, vals);
        Ok(Self { a, b, certificate })
    }

    /// Sets `b₃ = q/(a₁a₂a₃b₁b₂)`.
    pub fn completing(ctx: &QContext<R>, a: [C<R>; 3], b: [C<R>; 2]) -> Result<Self> {
        let b3 = ctx.q() * inv(a[0] * a[1] * a[2] * b[0] * b[1]);
        Self::balanced(ctx, a, [b[0], b[1], b3])
    }

    #[inline]
    pub fn a(&self) -> &[C<R>; 3] {
        &self.a
    }

    #[inline]
    pub fn b(&self) -> &[C<R>; 3] {
        &self.b
    }

    /// `t = a₁a₂a₃ = q/(b₁b₂b₃)`.
    pub fn t(&self) -> C<R> {
        self.a[0] * self.a[1] * self.a[2]
    }

    pub fn certificate(&self) -> GenericityCertificate {
        self.certificate
    }

    /// The parameters with the roles of `a` and `b` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            certificate: self.certificate,
        }
    }

    /// `a_j ↦ a_j/c`, `b_j ↦ b_j c`.
    pub fn scaled(&self, c: C<R>) -> Self {
        let ci = inv(c);
        Self {
            a: self.a.map(|x| x * ci),
            b: self.b.map(|x| x * c),
            certificate: self.certificate,
        }
    }

    pub fn permuted(&self, ctx: &QContext<R>, pa: [usize; 3], pb: [usize; 3]) -> Result<Self> {
        Self::balanced(ctx, pa.map(|i| self.a[i]), pb.map(|i| self.b[i]))
    }

    /// `a_j q^{m_j}`, `b_j q^{n_j}` with `Σ m_j = Σ n_j = 0`.
    pub fn shifted(&self, ctx: &QContext<R>, m: [i64; 3], n: [i64; 3]) -> Result<Self> {
        if m.iter().sum::<i64>() != 0 || n.iter().sum::<i64>() != 0 {
            return Err(QsvError::InvalidIndex("shifts must sum to zero".into()));
        }
        let mut a = self.a;
        let mut b = self.b;
        for j in 0..3 {
            a[j] = a[j] * ctx.qpow(m[j]);
            b[j] = b[j] * ctx.qpow(n[j]);
        }
        Self::balanced(ctx, a, b)
    }
}
