//! Lazy enumeration of compositions, weak compositions and ordered families
//! of disjoint subsets, plus elementary symmetric polynomials of logarithms.
//!
//! Every stream is produced in lexicographic order without materializing the
//! full list. Subset indices are 0-based.

use rug::Float;

use crate::context::{PrecisionContext, Real};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    pub parts: Vec<u32>,
    pub total: u32,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::out_of_range("composition parts must be positive and nonempty"));
        }
        let total = parts.iter().sum();
        Ok(Composition { parts, total })
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeakComposition {
    pub parts: Vec<u32>,
    pub total: u32,
}

/// Ordered blocks `(K_1, ..., K_s)` of `{0, ..., r-1}` together with the
/// remainder `K_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DisjointSubsetFamily {
    pub r: usize,
    pub blocks: Vec<Vec<usize>>,
    pub masks: Vec<u64>,
    pub remainder: Vec<usize>,
    pub remainder_mask: u64,
}

pub struct Compositions {
    current: Option<Vec<u32>>,
    total: u32,
}

/// Compositions of `t` into exactly `s` positive parts.
pub fn compositions(t: u32, s: u32) -> Result<Compositions> {
    if s == 0 || s > t {
        return Err(Error::out_of_range(format!("compositions need 1 <= s <= t, got t={t}, s={s}")));
    }
    let mut first = vec![1u32; s as usize];
    first[s as usize - 1] = t - (s - 1);
    Ok(Compositions { current: Some(first), total: t })
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let cur = self.current.take()?;
        self.current = successor(&cur, 1);
        Some(Composition { parts: cur, total: self.total })
    }
}

// Lexicographic successor among vectors of fixed length and sum whose parts
// are all >= min.
fn successor(cur: &[u32], min: u32) -> Option<Vec<u32>> {
    let s = cur.len();
    if s < 2 {
        return None;
    }
    let mut suffix = cur[s - 1];
    for i in (0..s - 1).rev() {
        let slots = (s - 1 - i) as u32;
        if suffix >= 1 && suffix > slots * min {
            let mut next = cur.to_vec();
            next[i] += 1;
            let rest = suffix - 1;
            for p in next.iter_mut().take(s - 1).skip(i + 1) {
                *p = min;
            }
            next[s - 1] = rest - (slots - 1) * min;
            return Some(next);
        }
        suffix += cur[i];
    }
    None
}

pub struct WeakCompositions {
    current: Option<Vec<u32>>,
    total: u32,
}

/// Weak compositions of `l` into exactly `s` nonnegative parts.
pub fn weak_compositions(l: u32, s: u32) -> Result<WeakCompositions> {
    if s == 0 {
        return Err(Error::out_of_range("weak compositions need s >= 1"));
    }
    let mut first = vec![0u32; s as usize];
    first[s as usize - 1] = l;
    Ok(WeakCompositions { current: Some(first), total: l })
}

impl Iterator for WeakCompositions {
    type Item = WeakComposition;

    fn next(&mut self) -> Option<WeakComposition> {
        let cur = self.current.take()?;
        self.current = if self.total == 0 { None } else { successor(&cur, 0) };
        Some(WeakComposition { parts: cur, total: self.total })
    }
}

struct Level {
    avail: Vec<usize>,
    pick: Vec<usize>, // positions into avail, strictly increasing
}

impl Level {
    fn first(avail: Vec<usize>, k: usize) -> Level {
        Level { avail, pick: (0..k).collect() }
    }

    fn advance(&mut self) -> bool {
        let n = self.avail.len();
        let k = self.pick.len();
        for i in (0..k).rev() {
            if self.pick[i] < n - k + i {
                self.pick[i] += 1;
                for j in i + 1..k {
                    self.pick[j] = self.pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    fn chosen(&self) -> Vec<usize> {
        self.pick.iter().map(|&p| self.avail[p]).collect()
    }

    fn left(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.avail.len() - self.pick.len());
        let mut q = 0;
        for (pos, &e) in self.avail.iter().enumerate() {
            if q < self.pick.len() && self.pick[q] == pos {
                q += 1;
            } else {
                out.push(e);
            }
        }
        out
    }
}

pub struct DisjointSubsetFamilies {
    r: usize,
    sizes: Vec<usize>,
    levels: Vec<Level>,
    done: bool,
}

/// Ordered families `(K_1, ..., K_s)` of disjoint subsets of `{0..r-1}`
/// with `|K_i| = k_i`.
pub fn disjoint_subset_families(r: usize, k: &Composition) -> Result<DisjointSubsetFamilies> {
    if r > 64 {
        return Err(Error::out_of_range(format!("subset families support r <= 64, got {r}")));
    }
    if k.total as usize > r {
        return Err(Error::out_of_range(format!(
            "composition total {} exceeds ground set size {r}",
            k.total
        )));
    }
    let sizes: Vec<usize> = k.parts.iter().map(|&p| p as usize).collect();
    let mut fam = DisjointSubsetFamilies { r, sizes, levels: Vec::new(), done: false };
    fam.fill_from(0, (0..r).collect());
    Ok(fam)
}

impl DisjointSubsetFamilies {
    fn fill_from(&mut self, start: usize, mut avail: Vec<usize>) {
        self.levels.truncate(start);
        for &k in &self.sizes[start..] {
            let lvl = Level::first(avail, k);
            avail = lvl.left();
            self.levels.push(lvl);
        }
    }

    fn current(&self) -> DisjointSubsetFamily {
        let blocks: Vec<Vec<usize>> = self.levels.iter().map(Level::chosen).collect();
        let masks: Vec<u64> = blocks.iter().map(|b| mask_of(b)).collect();
        let used = masks.iter().fold(0u64, |a, m| a | m);
        let remainder: Vec<usize> = (0..self.r).filter(|i| used & (1u64 << i) == 0).collect();
        let remainder_mask = mask_of(&remainder);
        DisjointSubsetFamily { r: self.r, blocks, masks, remainder, remainder_mask }
    }
}

impl Iterator for DisjointSubsetFamilies {
    type Item = DisjointSubsetFamily;

    fn next(&mut self) -> Option<DisjointSubsetFamily> {
        if self.done {
            return None;
        }
        let out = self.current();
        let mut advanced = false;
        for i in (0..self.levels.len()).rev() {
            if self.levels[i].advance() {
                let rest = self.levels[i].left();
                self.fill_from(i + 1, rest);
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(out)
    }
}

pub fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

/// Elementary symmetric polynomials `e_0, ..., e_n` of `values`, by the
/// incremental product `prod (1 + v_i X)`.
pub fn elementary_symmetric(values: &[Real], ctx: &PrecisionContext) -> Vec<Real> {
    let mut e = vec![ctx.zero(); values.len() + 1];
    e[0] = ctx.one();
    for (i, v) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let add = Float::with_val(ctx.prec(), v * &e[j - 1]);
            e[j] += add;
        }
    }
    e
}

/// `Lambda_k(omega)`, the degree-`k` elementary symmetric polynomial of
/// `log omega_i`.
pub fn lambda_k(omega: &[Real], k: usize, ctx: &PrecisionContext) -> Result<Real> {
    if k > omega.len() {
        return Err(Error::out_of_range(format!("lambda_k needs k <= r = {}, got {k}", omega.len())));
    }
    Ok(lambda_all(omega, ctx)?.swap_remove(k))
}

/// `Lambda_0, ..., Lambda_r`.
pub fn lambda_all(omega: &[Real], ctx: &PrecisionContext) -> Result<Vec<Real>> {
    if omega.iter().any(|w| *w <= 0) {
        return Err(Error::domain("lambda_k needs positive weights"));
    }
    let logs: Vec<Real> = omega.iter().map(|w| Float::with_val(ctx.prec(), w.ln_ref())).collect();
    Ok(elementary_symmetric(&logs, ctx))
}
