use crate::dist_core::Marginal;
use crate::scalar::Scalar;

/// Revenue-maximizing take-it-or-leave-it price at or above `floor`,
/// returned with its revenue `p Pr[x >= p]`. Discrete priors are searched
/// exactly over their support; others over breakpoints, then refined by
/// golden-section search around the best breakpoint.
pub fn optimal_posted_price<S: Scalar, M: Marginal<S> + ?Sized>(d: &M, floor: &S) -> (S, S) {
    let mut cands: Vec<S> = d.breakpoints().into_iter().filter(|p| p >= floor).collect();
    cands.push(floor.clone());
    let rev = |p: &S| p.clone() * d.tail(p);
    let mut best = (floor.clone(), rev(floor));
    let mut best_idx = None;
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (idx, p) in cands.iter().enumerate() {
        let r = rev(p);
        if r > best.1 {
            best = (p.clone(), r);
            best_idx = Some(idx);
        }
    }
    if d.as_discrete().is_some() {
        return best;
    }
    let Some(idx) = best_idx else { return best };
    let lo = cands[idx.saturating_sub(1)].to_f64_lossy();
    let hi = cands.get(idx + 1).unwrap_or(&cands[idx]).to_f64_lossy();
    let f = |x: f64| {
        let p = S::from_f64_lossy(x);
        rev(&p).to_f64_lossy()
    };
    let (mut a, mut b) = (lo, hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let e = a + g * (b - a);
        if f(c) >= f(e) {
            b = e;
        } else {
            a = c;
        }
    }
    let x = S::from_f64_lossy((a + b) / 2.0);
    let r = rev(&x);
    if r > best.1 {
        best = (x, r);
    }
    best
}
