//! Product sharing: `A` holds `a`, `B` holds `b`, and they end with random `z^A`, `z^B` such
//! that `z^A + z^B = a·b` (with `a` on the left).
//!
//! Realizations: [`Rho`] (statistical, OT-based), [`Sigma`] (noisy linear codes), [`Tau`]
//! (packed, Reed–Solomon codes, `t` products per call), [`Wrapped`] (runs any of them on random
//! inputs, erases, and corrects), plus the homomorphic-encryption protocols in
//! [`crate::homenc`]. On top of these sit [`degree2_share`], its batched form, and
//! [`multiparty_product_share`].

use crate::codes::{gen_code, gen_rs_code_with_l, noisy_encode, stat_encode, CodeScheme, EvalPoints};
use crate::error::{Abort, Error, Result};
use crate::linalg::{add_vec, dot, eval_poly, lagrange_matrix, sub_vec};
use crate::ot::{CellKind, Session};
use crate::ring::{Label, Ring};

/// A two-party product-sharing protocol running inside a [`Session`].
pub trait ProductSharing {
    fn name(&self) -> String;

    /// Number of products shared per call.
    fn width(&self) -> usize {
        1
    }

    /// `left` holds `a`, `right` holds `b` (equal lengths, at most [`ProductSharing::width`]).
    /// Returns `(z_left, z_right)` with `z_left[i] + z_right[i] = a[i]·b[i]`.
    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)>;
}

impl<P: ProductSharing + ?Sized> ProductSharing for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn width(&self) -> usize {
        (**self).width()
    }

    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)> {
        (**self).share(s, left, right, a, b)
    }
}

pub(crate) fn check_inputs(p: &dyn ProductSharing, a: &[Label], b: &[Label]) -> Result<()> {
    if a.len() != b.len() || a.is_empty() || a.len() > p.width() {
        return Err(Error::param(format!(
            "{} takes 1..={} inputs per side, got {} and {}",
            p.name(),
            p.width(),
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

pub(crate) fn record_io(s: &mut Session, left: usize, right: usize, a: &[Label], b: &[Label]) {
    s.remember(left, "input", CellKind::Input, a);
    s.remember(right, "input", CellKind::Input, b);
}

pub(crate) fn record_out(s: &mut Session, left: usize, right: usize, za: &[Label], zb: &[Label]) {
    s.remember(left, "output", CellKind::Output, za);
    s.remember(right, "output", CellKind::Output, zb);
}

/// `⌈log2 |R|⌉ + k`, the default encoding length for [`Rho`].
pub fn rho_default_n(ring: &Ring, k: usize) -> usize {
    let log = match ring.order() {
        Some(q) => 128 - (q - 1).leading_zeros() as usize,
        None => ring.id().bit_length as usize,
    };
    log + k
}

/// Statistically secure product sharing from `n` 1-of-2 transfers.
#[derive(Debug, Clone)]
pub struct Rho {
    pub n: usize,
}

impl Rho {
    pub fn new(n: usize) -> Rho {
        Rho { n }
    }

    pub fn for_ring(ring: &Ring, k: usize) -> Rho {
        Rho::new(rho_default_n(ring, k))
    }
}

impl ProductSharing for Rho {
    fn name(&self) -> String {
        format!("rho(n={})", self.n)
    }

    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)> {
        check_inputs(self, a, b)?;
        record_io(s, left, right, a, b);
        let n = self.n;
        let enc = stat_encode(s.oracle(right), &b[0], n)?;
        s.remember_bits(right, "sigma", CellKind::Random, &enc.sigma);
        s.remember(right, "v0", CellKind::Local, &enc.v0);
        s.remember(right, "v1", CellKind::Local, &enc.v1);
        let msg: Vec<Label> = enc.v0.iter().chain(&enc.v1).cloned().collect();
        let got = s.send_named(right, left, "pairs", &msg);
        let (v0, v1) = got.split_at(n);

        let o = s.oracle(left);
        let t = o.sample_vec(n);
        let za = o.sum(&t)?;
        let mut w0 = Vec::with_capacity(n);
        let mut w1 = Vec::with_capacity(n);
        for i in 0..n {
            let p0 = o.mul(&a[0], &v0[i])?;
            w0.push(o.sub(&p0, &t[i])?);
            let p1 = o.mul(&a[0], &v1[i])?;
            w1.push(o.sub(&p1, &t[i])?);
        }
        s.remember(left, "t", CellKind::Random, &t);
        s.remember(left, "w0", CellKind::Local, &w0);
        s.remember(left, "w1", CellKind::Local, &w1);

        let received = s.parallel(n, |s, i| {
            Ok(s.ot_1of2(
                left,
                right,
                std::slice::from_ref(&w0[i]),
                std::slice::from_ref(&w1[i]),
                enc.sigma[i],
            ))
        })?;
        let received: Vec<Label> = received.into_iter().flatten().collect();
        let zb = s.oracle(right).sum(&received)?;
        let (za, zb) = (vec![za], vec![zb]);
        record_out(s, left, right, &za, &zb);
        Ok((za, zb))
    }
}

/// Product sharing from a noisy encoding with `t = 1`, using a fresh code per call.
///
/// Decoding applies `H` to `a·v`, so the ring must be commutative.
#[derive(Debug, Clone)]
pub struct Sigma {
    pub scheme: CodeScheme,
    pub k: usize,
}

impl Sigma {
    pub fn new(scheme: CodeScheme, k: usize) -> Sigma {
        Sigma { scheme, k }
    }
}

impl ProductSharing for Sigma {
    fn name(&self) -> String {
        format!("sigma({:?},k={})", self.scheme, self.k).to_lowercase()
    }

    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)> {
        check_inputs(self, a, b)?;
        if !s.ring().is_commutative() {
            return Err(Error::param("sigma decodes with H on the left and needs a commutative ring"));
        }
        if self.scheme == CodeScheme::Rs {
            return Err(Error::param("sigma uses t = 1 codes; use tau for Reed-Solomon codes"));
        }
        record_io(s, left, right, a, b);
        let code = gen_code(s.oracle(right), self.scheme, self.k, 8)?;
        let enc = noisy_encode(&code, s.oracle(right), &b[..1])?;
        s.remember(right, "u", CellKind::Random, &enc.u);
        let g = s.send_setup(right, left, "G", code.g.entries());
        let v = s.send_named(right, left, "v", &enc.v);

        let k = code.k();
        let n = code.n();
        let o = s.oracle(left);
        let x = o.sample_vec(k);
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let gx = dot(o, &g[i * k..(i + 1) * k], &x)?;
            let av = o.mul(&a[0], &v[i])?;
            w.push(o.sub(&av, &gx)?);
        }
        s.remember(left, "x", CellKind::Random, &x);
        s.remember(left, "w", CellKind::Local, &w);

        let w_l = s.ot_kofn(left, right, &w, &code.l)?;
        let zb = dot(s.oracle(right), code.h.row(0), &w_l)?;
        let (za, zb) = (vec![x[0].clone()], vec![zb]);
        record_out(s, left, right, &za, &zb);
        Ok((za, zb))
    }
}

/// Deliberate deviations of `A` in [`Tau`], for testing `B`'s optional check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauFault {
    #[default]
    None,
    /// `A` masks with a polynomial of degree `2k-1` instead of `2(k-1)`.
    HighDegreeMask,
}

/// Packed product sharing of `t` products per call from a Reed–Solomon noisy encoding.
#[derive(Debug, Clone)]
pub struct Tau {
    pub k: usize,
    pub c: usize,
    pub t: usize,
    pub points: EvalPoints,
    /// Extra noiseless positions `B` requests and checks against the interpolated polynomial.
    /// Zero disables the check.
    pub check_points: usize,
    pub fault: TauFault,
}

impl Tau {
    /// `t = k/2`, random points, no check.
    pub fn new(k: usize, c: usize) -> Tau {
        Tau::with_t(k, c, k / 2)
    }

    pub fn with_t(k: usize, c: usize, t: usize) -> Tau {
        Tau { k, c, t, points: EvalPoints::Random, check_points: 0, fault: TauFault::None }
    }

    pub fn strict(mut self, check_points: usize) -> Tau {
        self.check_points = check_points;
        self
    }
}

impl ProductSharing for Tau {
    fn name(&self) -> String {
        format!("tau(k={},c={},t={})", self.k, self.c, self.t)
    }

    fn width(&self) -> usize {
        self.t
    }

    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)> {
        check_inputs(self, a, b)?;
        let (k, t) = (self.k, self.t);
        if t == 0 || t > k {
            return Err(Error::param(format!("tau needs 1 <= t <= k, got t={t}, k={k}")));
        }
        record_io(s, left, right, a, b);
        let used = a.len();
        let pad = |s: &mut Session, p: usize, v: &[Label]| -> Vec<Label> {
            let mut v = v.to_vec();
            let z = s.oracle(p).zero();
            v.resize(t, z);
            v
        };
        let a_full = pad(s, left, a);
        let b_full = pad(s, right, b);

        let ell = 2 * k - 1 + self.check_points;
        let code = gen_rs_code_with_l(s.oracle(right), k, self.c, self.points, ell)?;
        let enc = noisy_encode(&code, s.oracle(right), &b_full)?;
        s.remember(right, "u", CellKind::Random, &enc.u);
        let (xs, ys) = code.eval_points.clone().expect("Reed-Solomon code has points");
        let pts: Vec<Label> = xs.iter().chain(&ys).cloned().collect();
        let pts = s.send_setup(right, left, "points", &pts);
        let (xs_a, ys_a) = pts.split_at(k);
        let v = s.send_named(right, left, "v", &enc.v);

        // A: P_a through (x_i, a_i) for i <= t, random elsewhere; P_r random of degree 2(k-1).
        let n = code.n();
        let o = s.oracle(left);
        let mut ua = a_full.clone();
        ua.extend(o.sample_vec(k - t));
        let g = lagrange_matrix(o, xs_a, ys_a)?;
        let pa_y = g.mul_vec(o, &ua)?;
        let mask_coeffs = match self.fault {
            TauFault::None => 2 * k - 1,
            TauFault::HighDegreeMask => 2 * k,
        };
        let pr = o.sample_vec(mask_coeffs);
        let mut w = Vec::with_capacity(n);
        for j in 0..n {
            let prod = o.mul(&pa_y[j], &v[j])?;
            let m = eval_poly(o, &pr, &ys_a[j])?;
            w.push(o.sub(&prod, &m)?);
        }
        let za: Vec<Label> = xs_a[..t].iter().map(|x| eval_poly(o, &pr, x)).collect::<Result<_>>()?;
        s.remember(left, "mask", CellKind::Random, &pr);
        s.remember(left, "w", CellKind::Local, &w);

        let w_l = s.ot_kofn(left, right, &w, &code.l)?;
        let o = s.oracle(right);
        if self.check_points > 0 {
            let base: Vec<Label> = code.l[..2 * k - 1].iter().map(|&j| ys[j].clone()).collect();
            let extra: Vec<Label> = code.l[2 * k - 1..].iter().map(|&j| ys[j].clone()).collect();
            let ext = lagrange_matrix(o, &base, &extra)?;
            let predicted = ext.mul_vec(o, &w_l[..2 * k - 1])?;
            if predicted != w_l[2 * k - 1..] {
                return Err(Abort::new(
                    "tau-degree-check",
                    "received points do not lie on a polynomial of degree 2(k-1)",
                )
                .with_complainers(vec![right])
                .into());
            }
        }
        let decoded = code.decode_at(o, &w_l)?;
        let mut za = za;
        let mut zb = decoded[..t].to_vec();
        za.truncate(used);
        zb.truncate(used);
        record_out(s, left, right, &za, &zb);
        Ok((za, zb))
    }
}

/// Runs the inner protocol on fresh random inputs, erases its memory, then corrects with
/// `a - r^A` and `b - r^B`.
pub struct Wrapped<P> {
    pub inner: P,
}

impl<P: ProductSharing> Wrapped<P> {
    pub fn new(inner: P) -> Self {
        Wrapped { inner }
    }
}

impl<P: ProductSharing> ProductSharing for Wrapped<P> {
    fn name(&self) -> String {
        format!("wrapped({})", self.inner.name())
    }

    fn width(&self) -> usize {
        self.inner.width()
    }

    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)> {
        check_inputs(self, a, b)?;
        record_io(s, left, right, a, b);
        let w = a.len();
        let ra = s.oracle(left).sample_vec(w);
        let rb = s.oracle(right).sample_vec(w);
        s.remember(left, "r", CellKind::Random, &ra);
        s.remember(right, "r", CellKind::Random, &rb);

        let scope = s.push_scope();
        let inner = self.inner.share(s, left, right, &ra, &rb);
        s.pop_scope();
        s.erase(left, scope);
        s.erase(right, scope);
        let (sa, sb) = inner?;
        s.remember(left, "s", CellKind::Local, &sa);
        s.remember(right, "s", CellKind::Local, &sb);

        let da = sub_vec(s.oracle(left), a, &ra)?;
        let db = sub_vec(s.oracle(right), b, &rb)?;
        let got = s.parallel(2, |s, j| {
            Ok(if j == 0 {
                s.send_named(left, right, "correction", &da)
            } else {
                s.send_named(right, left, "correction", &db)
            })
        })?;
        let (da_at_b, db_at_a) = (&got[0], &got[1]);

        let o = s.oracle(left);
        let mut za = Vec::with_capacity(w);
        for i in 0..w {
            let p = o.mul(&a[i], &db_at_a[i])?;
            za.push(o.add(&p, &sa[i])?);
        }
        let o = s.oracle(right);
        let mut zb = Vec::with_capacity(w);
        for i in 0..w {
            let p = o.mul(&da_at_b[i], &rb[i])?;
            zb.push(o.add(&p, &sb[i])?);
        }
        record_out(s, left, right, &za, &zb);
        Ok((za, zb))
    }
}

/// Counts calls made to the wrapped protocol.
pub struct Counted<P> {
    pub inner: P,
    pub calls: u64,
}

impl<P: ProductSharing> Counted<P> {
    pub fn new(inner: P) -> Self {
        Counted { inner, calls: 0 }
    }
}

impl<P: ProductSharing> ProductSharing for Counted<P> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn width(&self) -> usize {
        self.inner.width()
    }

    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)> {
        self.calls += 1;
        self.inner.share(s, left, right, a, b)
    }
}

/// `c_A + c_B = (x_A + x_B)(y_A + y_B)` from two product sharings: `x_A·y_B` with `A` on the
/// left, and `x_B`'s cross term. Over a commutative ring the second call is `(y_A, x_B)` with
/// `A` on the left; otherwise it is `(x_B, y_A)` with `B` on the left so that the product keeps
/// its order.
pub fn degree2_share(
    s: &mut Session,
    backend: &mut dyn ProductSharing,
    x_a: &Label,
    y_a: &Label,
    x_b: &Label,
    y_b: &Label,
) -> Result<(Label, Label)> {
    let mut out =
        degree2_share_many(s, backend, &[(x_a.clone(), y_a.clone())], &[(x_b.clone(), y_b.clone())])?;
    Ok(out.pop().expect("one product"))
}

/// One product-sharing instance requested by [`degree2_share_many`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    pub left_is_a: bool,
    pub product: usize,
}

/// Groups instances into calls of at most `width`; instances of the same orientation share a
/// call. With a single orientation this yields `⌈count/width⌉` batches.
pub fn schedule_batches(instances: &[Instance], width: usize) -> Vec<Vec<usize>> {
    let width = width.max(1);
    let mut out = Vec::new();
    for orient in [true, false] {
        let idx: Vec<usize> = (0..instances.len()).filter(|&i| instances[i].left_is_a == orient).collect();
        out.extend(idx.chunks(width).map(<[usize]>::to_vec));
    }
    out
}

/// Number of backend calls for `muls` products over a commutative ring: `⌈2·muls / t⌉`.
pub fn batch_count(muls: usize, t: usize) -> usize {
    (2 * muls).div_ceil(t.max(1))
}

/// Many degree-2 sharings at once; the backend calls run in parallel and are packed up to the
/// backend's width. Inputs are `(x_A, y_A)` per product for `A` and `(x_B, y_B)` for `B`.
pub fn degree2_share_many(
    s: &mut Session,
    backend: &mut dyn ProductSharing,
    a_side: &[(Label, Label)],
    b_side: &[(Label, Label)],
) -> Result<Vec<(Label, Label)>> {
    const A: usize = 0;
    const B: usize = 1;
    if a_side.len() != b_side.len() {
        return Err(Error::param("both parties must supply the same number of products"));
    }
    let commutative = s.ring().is_commutative();
    let mut instances = Vec::with_capacity(2 * a_side.len());
    let mut inputs: Vec<(Label, Label)> = Vec::with_capacity(2 * a_side.len());
    for (i, ((xa, ya), (xb, yb))) in a_side.iter().zip(b_side).enumerate() {
        instances.push(Instance { left_is_a: true, product: i });
        inputs.push((xa.clone(), yb.clone()));
        if commutative {
            instances.push(Instance { left_is_a: true, product: i });
            inputs.push((ya.clone(), xb.clone()));
        } else {
            instances.push(Instance { left_is_a: false, product: i });
            inputs.push((xb.clone(), ya.clone()));
        }
    }
    let batches = schedule_batches(&instances, backend.width());
    let results = s.parallel(batches.len(), |s, j| {
        let batch = &batches[j];
        let lefts: Vec<Label> = batch.iter().map(|&i| inputs[i].0.clone()).collect();
        let rights: Vec<Label> = batch.iter().map(|&i| inputs[i].1.clone()).collect();
        let (l, r) = if instances[batch[0]].left_is_a { (A, B) } else { (B, A) };
        let (zl, zr) = backend.share(s, l, r, &lefts, &rights)?;
        // always report as (A's share, B's share)
        Ok(if l == A { (zl, zr) } else { (zr, zl) })
    })?;
    let mut share_a: Vec<Vec<Label>> = vec![Vec::new(); a_side.len()];
    let mut share_b: Vec<Vec<Label>> = vec![Vec::new(); a_side.len()];
    for (batch, (za, zb)) in batches.iter().zip(results) {
        for (pos, &i) in batch.iter().enumerate() {
            let p = instances[i].product;
            share_a[p].push(za[pos].clone());
            share_b[p].push(zb[pos].clone());
        }
    }
    let mut out = Vec::with_capacity(a_side.len());
    for (p, ((xa, ya), (xb, yb))) in a_side.iter().zip(b_side).enumerate() {
        let o = s.oracle(A);
        let mut ca = o.mul(xa, ya)?;
        for z in &share_a[p] {
            ca = o.add(&ca, z)?;
        }
        let o = s.oracle(B);
        let mut cb = o.mul(xb, yb)?;
        for z in &share_b[p] {
            cb = o.add(&cb, z)?;
        }
        out.push((ca, cb));
    }
    Ok(out)
}

/// `m` parties with `x_i`, `y_i` end with `c_i`, `Σ c_i = (Σ x_i)(Σ y_i)`, using one product
/// sharing per ordered pair `(i, j)`, `i ≠ j`. Party `i` of the session is `P_i`.
pub fn multiparty_product_share(
    s: &mut Session,
    backend: &mut dyn ProductSharing,
    x: &[Label],
    y: &[Label],
) -> Result<Vec<Label>> {
    let m = x.len();
    if m < 2 || y.len() != m || s.len() < m {
        return Err(Error::param("need m >= 2 parties with one x and one y each"));
    }
    let pairs: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let shares = s.parallel(pairs.len(), |s, p| {
        let (i, j) = pairs[p];
        backend.share(s, i, j, std::slice::from_ref(&x[i]), std::slice::from_ref(&y[j]))
    })?;
    let mut c: Vec<Label> = (0..m).map(|i| s.oracle(i).mul(&x[i], &y[i])).collect::<Result<_>>()?;
    for (&(i, j), (zi, zj)) in pairs.iter().zip(shares) {
        c[i] = s.oracle(i).add(&c[i], &zi[0])?;
        c[j] = s.oracle(j).add(&c[j], &zj[0])?;
    }
    Ok(c)
}

/// Sum of two share vectors by party `p`; handy in tests and callers.
pub fn combine_shares(s: &mut Session, p: usize, x: &[Label], y: &[Label]) -> Result<Vec<Label>> {
    add_vec(s.oracle(p), x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::{CellValue, Outcome, Tamper};

    fn check(ring: &Ring, backend: &mut dyn ProductSharing, seed: u64, a: &Label, b: &Label) {
        let mut s = Session::two_party(ring, seed);
        let (za, zb) = backend.share(&mut s, 0, 1, std::slice::from_ref(a), std::slice::from_ref(b)).unwrap();
        let mut o = ring.oracle(0);
        let sum = o.add(&za[0], &zb[0]).unwrap();
        assert_eq!(sum, o.mul(a, b).unwrap(), "{} seed {seed}", backend.name());
    }

    #[test]
    fn rho_z6_four_times_five() {
        let r = Ring::zm(6).unwrap();
        let mut rho = Rho::for_ring(&r, 40);
        assert_eq!(rho.n, 43);
        for seed in 0..100 {
            check(&r, &mut rho, seed, &r.from_u64(4), &r.from_u64(5));
        }
    }

    #[test]
    fn rho_zero_annihilates() {
        let r = Ring::zm(11).unwrap();
        let mut rho = Rho::new(20);
        for b in 0..11 {
            check(&r, &mut rho, b, &r.from_u64(0), &r.from_u64(b));
        }
    }

    #[test]
    fn rho_noncommutative_left_multiplication() {
        let r = Ring::matrix(3, 2).unwrap();
        let mut rho = Rho::for_ring(&r, 20);
        let mut o = r.oracle(99);
        for seed in 0..30 {
            let a = o.sample();
            let b = o.sample();
            check(&r, &mut rho, seed, &a, &b);
        }
    }

    #[test]
    fn rho_counts_pairs_and_ots() {
        let r = Ring::zm(5).unwrap();
        let mut s = Session::two_party(&r, 3);
        Rho::new(8).share(&mut s, 0, 1, &[r.from_u64(2)], &[r.from_u64(3)]).unwrap();
        let st = s.stats();
        assert_eq!(st.elements_transmitted, 16);
        assert_eq!(st.ot_invocations, 8);
        assert_eq!(st.ot_elements, 16);
        assert_eq!(st.rounds, 2);
    }

    #[test]
    fn rho_view_of_a_has_no_sigma() {
        let r = Ring::zm(5).unwrap();
        let mut s = Session::two_party(&r, 3);
        Rho::new(8).share(&mut s, 0, 1, &[r.from_u64(2)], &[r.from_u64(3)]).unwrap();
        let va = s.capture_view(0);
        assert!(!va.has("sigma"));
        assert!(va.cells.iter().all(|c| !matches!(c.value, CellValue::Bits(_))));
        assert!(s.capture_view(1).has("sigma"));
    }

    #[test]
    fn rho_tampered_message_aborts() {
        let r = Ring::zm(5).unwrap();
        let mut s = Session::two_party(&r, 3);
        s.set_tamper(Some(Tamper { delivery: 0, position: 2 }));
        let res = Rho::new(8).share(&mut s, 0, 1, &[r.from_u64(2)], &[r.from_u64(3)]);
        assert!(Outcome::from_result(res, "rho").unwrap().is_abort());
    }

    #[test]
    fn sigma_gf97_and_unit_a() {
        let r = Ring::prime_field(97).unwrap();
        let mut sigma = Sigma::new(CodeScheme::Rand, 8);
        let mut o = r.oracle(5);
        for seed in 0..50 {
            let a = o.sample();
            let b = o.sample();
            check(&r, &mut sigma, seed, &a, &b);
            check(&r, &mut sigma, seed, &r.from_u64(1), &b);
        }
    }

    #[test]
    fn sigma_ring_code_never_inverts() {
        let r = Ring::zm(6).unwrap();
        let mut sigma = Sigma::new(CodeScheme::Ring, 8);
        for seed in 0..50 {
            let mut s = Session::two_party(&r, seed);
            let (a, b) = (r.from_u64(seed % 6), r.from_u64((seed / 6) % 6));
            let (za, zb) =
                sigma.share(&mut s, 0, 1, std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap();
            let mut o = r.oracle(0);
            assert_eq!(o.add(&za[0], &zb[0]).unwrap(), o.mul(&a, &b).unwrap());
            for p in 0..2 {
                assert_eq!(s.oracle(p).counter().calls_of(crate::ring::Command::Invert), 0);
            }
        }
    }

    #[test]
    fn sigma_slwalk_code() {
        let r = Ring::zm(10).unwrap();
        let mut sigma = Sigma::new(CodeScheme::Slwalk, 4);
        for seed in 0..20 {
            check(&r, &mut sigma, seed, &r.from_u64(7), &r.from_u64(9));
        }
    }

    #[test]
    fn sigma_rejects_noncommutative() {
        let r = Ring::matrix(5, 2).unwrap();
        let mut s = Session::two_party(&r, 0);
        let one = r.from_u64(1);
        assert!(Sigma::new(CodeScheme::Ring, 4)
            .share(&mut s, 0, 1, std::slice::from_ref(&one), std::slice::from_ref(&one))
            .is_err());
    }

    fn tau_check(r: &Ring, tau: &mut Tau, seed: u64) -> Result<()> {
        let mut o = r.oracle(seed + 1000);
        let a = o.sample_vec(tau.t);
        let b = o.sample_vec(tau.t);
        let mut s = Session::two_party(r, seed);
        let (za, zb) = tau.share(&mut s, 0, 1, &a, &b)?;
        for i in 0..tau.t {
            assert_eq!(o.add(&za[i], &zb[i]).unwrap(), o.mul(&a[i], &b[i]).unwrap());
        }
        Ok(())
    }

    #[test]
    fn tau_packed_products() {
        let r = Ring::prime_field(2305843009213693951).unwrap();
        let mut tau = Tau::with_t(8, 8, 4);
        for seed in 0..20 {
            tau_check(&r, &mut tau, seed).unwrap();
        }
    }

    #[test]
    fn tau_all_ones_gives_b() {
        let r = Ring::prime_field(1_000_003).unwrap();
        let mut tau = Tau::with_t(4, 8, 2);
        let mut s = Session::two_party(&r, 1);
        let ones = vec![r.from_u64(1); 2];
        let b = vec![r.from_u64(17), r.from_u64(99)];
        let (za, zb) = tau.share(&mut s, 0, 1, &ones, &b).unwrap();
        let mut o = r.oracle(0);
        for i in 0..2 {
            assert_eq!(o.add(&za[i], &zb[i]).unwrap(), b[i]);
        }
    }

    #[test]
    fn tau_communication_per_product() {
        let r = Ring::prime_field(2305843009213693951).unwrap();
        let mut s = Session::two_party(&r, 1);
        let mut o = r.oracle(3);
        let (a, b) = (o.sample_vec(4), o.sample_vec(4));
        Tau::with_t(8, 8, 4).share(&mut s, 0, 1, &a, &b).unwrap();
        let st = s.stats();
        assert_eq!(st.elements_transmitted, 64);
        assert_eq!(st.ot_elements, 64);
        assert_eq!(st.total_elements() / 4, 32);
        assert_eq!(st.setup_elements, 72);
    }

    #[test]
    fn tau_strict_check_catches_high_degree_mask() {
        let r = Ring::prime_field(1_000_003).unwrap();
        let mut honest = Tau::with_t(4, 8, 2).strict(3);
        let mut cheat = Tau::with_t(4, 8, 2).strict(3);
        cheat.fault = TauFault::HighDegreeMask;
        for seed in 0..20 {
            tau_check(&r, &mut honest, seed).unwrap();
            let err = tau_check(&r, &mut cheat, seed).unwrap_err();
            assert!(err.is_abort());
        }
    }

    #[test]
    fn wrapped_rho_z7_and_view() {
        let r = Ring::zm(7).unwrap();
        let mut w = Wrapped::new(Rho::new(20));
        for seed in 0..100 {
            check(&r, &mut w, seed, &r.from_u64(seed % 7), &r.from_u64(3));
        }
        let mut s = Session::two_party(&r, 1);
        w.share(&mut s, 0, 1, &[r.from_u64(2)], &[r.from_u64(5)]).unwrap();
        for p in 0..2 {
            let view = s.capture_view(p);
            let mut names = view.names();
            names.sort();
            let other = if p == 0 { "B" } else { "A" };
            let expect = format!("correction from {other}");
            let mut want = vec!["input", "output", "r", "s", expect.as_str()];
            want.sort();
            assert_eq!(names, want);
        }
        let base = {
            let mut s = Session::two_party(&r, 1);
            Rho::new(20).share(&mut s, 0, 1, &[r.from_u64(2)], &[r.from_u64(5)]).unwrap();
            s.stats()
        };
        let st = s.stats();
        assert_eq!(st.elements_transmitted, base.elements_transmitted + 2);
        assert_eq!(st.ot_elements, base.ot_elements);
    }

    #[test]
    fn wrapped_zero_inputs_send_negated_masks() {
        let r = Ring::zm(7).unwrap();
        let mut s = Session::two_party(&r, 4);
        let zero = r.from_u64(0);
        let (za, zb) = Wrapped::new(Rho::new(10))
            .share(&mut s, 0, 1, std::slice::from_ref(&zero), std::slice::from_ref(&zero))
            .unwrap();
        let va = s.capture_view(0);
        let vb = s.capture_view(1);
        let mut o = r.oracle(0);
        let ra = va.labels("r").unwrap()[0].clone();
        let neg_ra = o.neg(&ra).unwrap();
        assert_eq!(vb.labels("correction from A").unwrap(), &[neg_ra]);
        assert_eq!(o.add(&za[0], &zb[0]).unwrap(), zero);
    }

    #[test]
    fn degree2_counts_and_identity() {
        let r = Ring::prime_field(97).unwrap();
        let mut o = r.oracle(8);
        for seed in 0..30 {
            let v = o.sample_vec(4);
            let mut s = Session::two_party(&r, seed);
            let mut backend = Counted::new(Sigma::new(CodeScheme::Rand, 4));
            let (ca, cb) = degree2_share(&mut s, &mut backend, &v[0], &v[1], &v[2], &v[3]).unwrap();
            assert_eq!(backend.calls, 2);
            let x = o.add(&v[0], &v[2]).unwrap();
            let y = o.add(&v[1], &v[3]).unwrap();
            assert_eq!(o.add(&ca, &cb).unwrap(), o.mul(&x, &y).unwrap());
        }
        let zero = r.from_u64(0);
        let mut s = Session::two_party(&r, 0);
        let (ca, cb) = degree2_share(&mut s, &mut Rho::new(12), &zero, &zero, &zero, &zero).unwrap();
        assert_eq!(o.add(&ca, &cb).unwrap(), zero);
    }

    #[test]
    fn degree2_noncommutative() {
        let r = Ring::matrix(5, 2).unwrap();
        let mut o = r.oracle(8);
        for seed in 0..10 {
            let v = o.sample_vec(4);
            let mut s = Session::two_party(&r, seed);
            let (ca, cb) = degree2_share(&mut s, &mut Rho::new(12), &v[0], &v[1], &v[2], &v[3]).unwrap();
            let x = o.add(&v[0], &v[2]).unwrap();
            let y = o.add(&v[1], &v[3]).unwrap();
            assert_eq!(o.add(&ca, &cb).unwrap(), o.mul(&x, &y).unwrap());
        }
    }

    #[test]
    fn batches_follow_ceiling_formula() {
        assert_eq!(batch_count(1, 8), 1);
        assert_eq!(batch_count(16, 8), 4);
        assert_eq!(batch_count(32, 8), 8);
        let inst: Vec<Instance> = (0..32).map(|i| Instance { left_is_a: true, product: i / 2 }).collect();
        assert_eq!(schedule_batches(&inst, 8).len(), 4);
    }

    #[test]
    fn multiparty_sums() {
        let r = Ring::zm(11).unwrap();
        let mut o = r.oracle(1);
        for (m, seeds) in [(2usize, 20u64), (3, 40), (4, 10)] {
            for seed in 0..seeds {
                let names: Vec<String> = (0..m).map(|i| format!("P{i}")).collect();
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                let mut s = Session::new(&r, &refs, seed);
                let x = o.sample_vec(m);
                let y = o.sample_vec(m);
                let mut backend = Counted::new(Rho::new(10));
                let c = multiparty_product_share(&mut s, &mut backend, &x, &y).unwrap();
                assert_eq!(backend.calls as usize, m * (m - 1));
                let sx = o.sum(&x).unwrap();
                let sy = o.sum(&y).unwrap();
                assert_eq!(o.sum(&c).unwrap(), o.mul(&sx, &sy).unwrap());
            }
        }
    }
}
