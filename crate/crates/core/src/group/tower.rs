//! Finite permutation quotients and towers of them.
//!
//! A level is a homomorphism `G → Sym(d)` given on generators, whose image
//! acts regularly, so `d = |Q| = [G : G_i]`. Composition convention: the
//! word `g₁ g₂ ⋯ gₙ` acts as `σ_{g₁} ∘ σ_{g₂} ∘ ⋯ ∘ σ_{gₙ}`, which makes the
//! permutation-matrix evaluation a ring homomorphism.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::presentation::GroupPresentation;
use crate::group::word::Word;

/// A permutation of `{0, …, n−1}` stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::Tower(format!(
                    "image array {images:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Parses cycle notation such as `(0 1 2)(3 4)`; `()` or an empty string
    /// is the identity.
    pub fn from_cycles(src: &str, n: usize) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut seen = vec![false; n];
        let bad = |m: &str| Error::Tower(format!("bad cycle notation `{src}`: {m}"));
        let mut rest = src.trim();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(bad("expected `(`"));
            }
            let close = rest.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let body = &rest[1..close];
            let pts: Vec<u32> = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u32>().map_err(|_| bad("non-integer point")))
                .collect::<Result<_>>()?;
            for &p in &pts {
                if p as usize >= n {
                    return Err(bad("point out of range"));
                }
                if seen[p as usize] {
                    return Err(bad("point repeated"));
                }
                seen[p as usize] = true;
            }
            for k in 0..pts.len() {
                images[pts[k] as usize] = pts[(k + 1) % pts.len()];
            }
            rest = rest[close + 1..].trim_start();
        }
        Ok(Permutation(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.0[p] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation(other.0.iter().map(|&j| self.0[j as usize]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut l = 1u64;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                p = self.0[p] as usize;
                len += 1;
            }
            l = num_integer::lcm(l, len);
        }
        l
    }

    pub fn cycle_string(&self) -> String {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut s = String::new();
        for start in 0..n {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            s.push('(');
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    s.push(' ');
                }
                first = false;
                s.push_str(&p.to_string());
                p = self.0[p] as usize;
            }
            s.push(')');
        }
        if s.is_empty() {
            s.push_str("()");
        }
        s
    }
}

/// One finite quotient `Q_i` given by the images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientLevel {
    label: i64,
    degree: usize,
    images: Vec<Permutation>,
    inverses: Vec<Permutation>,
}

impl QuotientLevel {
    pub fn new(label: i64, degree: usize, images: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Tower("level degree must be positive".into()));
        }
        if let Some(p) = images.iter().find(|p| p.len() != degree) {
            return Err(Error::Tower(format!(
                "permutation on {} points in a level of degree {degree}",
                p.len()
            )));
        }
        let inverses = images.iter().map(Permutation::inverse).collect();
        Ok(QuotientLevel {
            label,
            degree,
            images,
            inverses,
        })
    }

    /// The group `ℤ/k₁ × ⋯ × ℤ/kₙ` acting on itself, generator `i` shifting
    /// coordinate `i`. Points are mixed-radix numbers with coordinate 0
    /// fastest.
    pub fn grid(dims: &[usize], label: i64) -> Result<Self> {
        let degree: usize = dims.iter().product();
        let mut images = Vec::with_capacity(dims.len());
        let mut stride = 1usize;
        for &k in dims {
            if k == 0 {
                return Err(Error::Tower("grid dimension must be positive".into()));
            }
            let img: Vec<u32> = (0..degree)
                .map(|p| {
                    let x = (p / stride) % k;
                    let base = p - x * stride;
                    (base + ((x + 1) % k) * stride) as u32
                })
                .collect();
            images.push(Permutation(img));
            stride *= k;
        }
        QuotientLevel::new(label, degree, images)
    }

    pub fn cyclic(k: usize) -> Result<Self> {
        QuotientLevel::grid(&[k], k as i64)
    }

    pub fn label(&self) -> i64 {
        self.label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    pub fn generator_count(&self) -> usize {
        self.images.len()
    }

    /// Permutation of a word (checked against the generator count).
    pub fn word_permutation(&self, w: &Word) -> Result<Permutation> {
        if let Some(g) = w.max_generator() {
            if g >= self.images.len() {
                return Err(Error::UndeclaredGenerator(format!("#{g}")));
            }
        }
        let mut perm: Vec<u32> = (0..self.degree as u32).collect();
        for &(g, e) in w.syllables().iter().rev() {
            let s = if e > 0 {
                &self.images[g]
            } else {
                &self.inverses[g]
            };
            for _ in 0..e.unsigned_abs() {
                for x in perm.iter_mut() {
                    *x = s.0[*x as usize];
                }
            }
        }
        Ok(Permutation(perm))
    }

    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.degree];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(p) = queue.pop_front() {
            for s in &self.images {
                let q = s.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    count += 1;
                    queue.push_back(q);
                }
            }
        }
        count == self.degree
    }

    pub fn is_abelian(&self) -> bool {
        for (i, a) in self.images.iter().enumerate() {
            for b in &self.images[i + 1..] {
                if (0..self.degree).any(|p| a.apply(b.apply(p)) != b.apply(a.apply(p))) {
                    return false;
                }
            }
        }
        true
    }

    /// Regularity test for a transitive action: the action is regular iff
    /// its centraliser in `Sym(d)` is also transitive.
    pub fn is_regular(&self) -> bool {
        if !self.is_transitive() {
            return false;
        }
        if self.is_abelian() {
            return true;
        }
        let d = self.degree;
        let order = self.bfs_order();
        let mut rho = vec![u32::MAX; d];
        for q in 0..d {
            rho.iter_mut().for_each(|x| *x = u32::MAX);
            rho[0] = q as u32;
            for &p in &order {
                let rp = rho[p] as usize;
                for s in &self.images {
                    let pq = s.apply(p);
                    let want = s.apply(rp) as u32;
                    if rho[pq] == u32::MAX {
                        rho[pq] = want;
                    } else if rho[pq] != want {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn bfs_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        let mut order = vec![0usize];
        seen[0] = true;
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for s in &self.images {
                let q = s.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    order.push(q);
                }
            }
        }
        order
    }

    /// Order of the generated permutation group, or `None` if it exceeds
    /// `cap`.
    pub fn group_order(&self, cap: usize) -> Option<u64> {
        if self.is_regular() {
            return Some(self.degree as u64);
        }
        let id = Permutation::identity(self.degree);
        let mut seen = std::collections::HashSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in &self.images {
                let y = s.compose(&x);
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return None;
                    }
                    queue.push_back(y);
                }
            }
        }
        Some(seen.len() as u64)
    }

    /// The points reached from 0 along a breadth-first Schreier tree, and
    /// the tree edges `(parent, generator)` for every non-root point.
    pub(crate) fn schreier_tree(&self) -> (Vec<usize>, Vec<Option<(usize, usize)>>) {
        let mut parent = vec![None; self.degree];
        let mut seen = vec![false; self.degree];
        let mut order = vec![0usize];
        seen[0] = true;
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for (g, s) in self.images.iter().enumerate() {
                let q = s.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    parent[q] = Some((p, g));
                    order.push(q);
                }
            }
        }
        (order, parent)
    }
}

/// Derives the point map `fine → coarse` compatible with the generators
/// (sending 0 to 0), if one exists.
pub fn derive_connecting_map(fine: &QuotientLevel, coarse: &QuotientLevel) -> Option<Vec<u32>> {
    if fine.images.len() != coarse.images.len() {
        return None;
    }
    let mut map = vec![u32::MAX; fine.degree];
    map[0] = 0;
    let order = fine.bfs_order();
    if order.len() != fine.degree {
        return None;
    }
    for &p in &order {
        let mp = map[p] as usize;
        for (s, c) in fine.images.iter().zip(&coarse.images) {
            let q = s.apply(p);
            let want = c.apply(mp) as u32;
            if map[q] == u32::MAX {
                map[q] = want;
            } else if map[q] != want {
                return None;
            }
        }
    }
    Some(map)
}

/// A family of finite quotients, ordered by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientTower {
    levels: Vec<QuotientLevel>,
    /// `connecting_maps[i]` maps the points of level `i+1` onto level `i`.
    connecting_maps: Option<Vec<Vec<u32>>>,
}

impl QuotientTower {
    pub fn new(levels: Vec<QuotientLevel>, connecting_maps: Option<Vec<Vec<u32>>>) -> Result<Self> {
        if let Some(maps) = &connecting_maps {
            if maps.len() + 1 != levels.len().max(1) {
                return Err(Error::Tower(format!(
                    "{} connecting maps for {} levels",
                    maps.len(),
                    levels.len()
                )));
            }
            for (i, m) in maps.iter().enumerate() {
                if m.len() != levels[i + 1].degree {
                    return Err(Error::Tower(format!(
                        "connecting map {i} has {} entries, level {} has degree {}",
                        m.len(),
                        i + 1,
                        levels[i + 1].degree
                    )));
                }
            }
        }
        Ok(QuotientTower {
            levels,
            connecting_maps,
        })
    }

    /// Cyclic quotients `ℤ/k` of `ℤ`, with connecting maps where each `k`
    /// divides the next.
    pub fn cyclic(ks: &[usize]) -> Result<Self> {
        let levels = ks
            .iter()
            .map(|&k| QuotientLevel::cyclic(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuotientTower::with_derived_maps(levels))
    }

    /// Grid quotients `(ℤ/k)ⁿ` of `ℤⁿ`.
    pub fn grid(n: usize, ks: &[usize]) -> Result<Self> {
        let levels = ks
            .iter()
            .map(|&k| QuotientLevel::grid(&vec![k; n], k as i64))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuotientTower::with_derived_maps(levels))
    }

    /// Rectangular grid quotients `ℤ/k₁ × ⋯ × ℤ/kₙ` of `ℤⁿ`.
    pub fn rectangular(dims: &[Vec<usize>]) -> Result<Self> {
        let levels = dims
            .iter()
            .map(|d| QuotientLevel::grid(d, d.iter().product::<usize>() as i64))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuotientTower::with_derived_maps(levels))
    }

    /// Attaches derived connecting maps when every consecutive pair admits
    /// one; otherwise the levels are an unordered family.
    pub fn with_derived_maps(levels: Vec<QuotientLevel>) -> Self {
        let maps: Option<Vec<Vec<u32>>> = levels
            .windows(2)
            .map(|w| derive_connecting_map(&w[1], &w[0]))
            .collect();
        let connecting_maps = if levels.len() > 1 { maps } else { None };
        QuotientTower {
            levels,
            connecting_maps,
        }
    }

    pub fn levels(&self) -> &[QuotientLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn connecting_maps(&self) -> Option<&[Vec<u32>]> {
        self.connecting_maps.as_deref()
    }

    pub fn last_index(&self) -> Option<usize> {
        self.levels.last().map(|l| l.degree)
    }

    /// Tower without level `i` (connecting maps dropped).
    pub fn without_level(&self, i: usize) -> Self {
        let mut levels = self.levels.clone();
        levels.remove(i);
        QuotientTower {
            levels,
            connecting_maps: None,
        }
    }

    /// Parses the JSON tower format, resolving generator names against `g`.
    pub fn from_json(text: &str, g: &GroupPresentation) -> Result<Self> {
        let file: TowerFile = serde_json::from_str(text)?;
        file.into_tower(g)
    }

    pub fn to_json(&self, g: &GroupPresentation) -> String {
        let file = TowerFile {
            levels: self
                .levels
                .iter()
                .map(|l| LevelFile {
                    label: Some(l.label),
                    degree: l.degree,
                    images: ImagesFile::Named(
                        g.generators()
                            .iter()
                            .cloned()
                            .zip(l.images.iter().map(|p| PermFile::Cycles(p.cycle_string())))
                            .collect(),
                    ),
                })
                .collect(),
            connecting_maps: self.connecting_maps.clone(),
        };
        serde_json::to_string_pretty(&file).expect("tower serialises")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PermFile {
    Images(Vec<u32>),
    Cycles(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ImagesFile {
    Named(std::collections::BTreeMap<String, PermFile>),
    Ordered(Vec<PermFile>),
}

#[derive(Serialize, Deserialize)]
struct LevelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<i64>,
    degree: usize,
    images: ImagesFile,
}

#[derive(Serialize, Deserialize)]
struct TowerFile {
    levels: Vec<LevelFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    connecting_maps: Option<Vec<Vec<u32>>>,
}

impl TowerFile {
    fn into_tower(self, g: &GroupPresentation) -> Result<QuotientTower> {
        let mut levels = Vec::new();
        for (li, lf) in self.levels.into_iter().enumerate() {
            let d = lf.degree;
            let to_perm = |p: PermFile| match p {
                PermFile::Images(v) => {
                    if v.len() != d {
                        Err(Error::Tower(format!(
                            "level {li}: image array of length {} for degree {d}",
                            v.len()
                        )))
                    } else {
                        Permutation::from_images(v)
                    }
                }
                PermFile::Cycles(s) => Permutation::from_cycles(&s, d),
            };
            let images = match lf.images {
                ImagesFile::Ordered(v) => {
                    if v.len() != g.rank() {
                        return Err(Error::Tower(format!(
                            "level {li}: {} images for {} generators",
                            v.len(),
                            g.rank()
                        )));
                    }
                    v.into_iter().map(to_perm).collect::<Result<Vec<_>>>()?
                }
                ImagesFile::Named(mut m) => {
                    let mut out = Vec::new();
                    for name in g.generators() {
                        let p = m.remove(name).ok_or_else(|| {
                            Error::Tower(format!("level {li}: no image for generator `{name}`"))
                        })?;
                        out.push(to_perm(p)?);
                    }
                    if let Some(extra) = m.keys().next() {
                        return Err(Error::UndeclaredGenerator(extra.clone()));
                    }
                    out
                }
            };
            levels.push(QuotientLevel::new(
                lf.label.unwrap_or(d as i64),
                d,
                images,
            )?);
        }
        QuotientTower::new(levels, self.connecting_maps)
    }
}

/// Per-level outcome of [`validate_tower`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCheck {
    pub level: usize,
    pub label: i64,
    pub degree: usize,
    pub generators_ok: bool,
    pub failing_relators: Vec<String>,
    pub transitive: bool,
    /// Order of the permutation group (`None`: larger than the search cap).
    pub order: Option<u64>,
    pub regular: bool,
    pub connecting_map_ok: Option<bool>,
}

impl LevelCheck {
    pub fn pass(&self) -> bool {
        self.generators_ok
            && self.failing_relators.is_empty()
            && self.transitive
            && self.regular
            && self.connecting_map_ok != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerReport {
    pub levels: Vec<LevelCheck>,
    pub degrees_monotone: bool,
    pub pass: bool,
}

impl TowerReport {
    /// Human-readable description of every failure.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.degrees_monotone {
            out.push("level degrees are not non-decreasing".to_string());
        }
        for c in &self.levels {
            if !c.generators_ok {
                out.push(format!("level {}: wrong number of generator images", c.level));
            }
            for r in &c.failing_relators {
                out.push(format!("level {}: relator `{r}` is not the identity", c.level));
            }
            if !c.transitive {
                out.push(format!("level {}: action is not transitive", c.level));
            }
            if !c.regular {
                let ord = c
                    .order
                    .map_or_else(|| "> cap".to_string(), |o| o.to_string());
                out.push(format!(
                    "level {}: action is not regular (order {ord} ≠ degree {})",
                    c.level, c.degree
                ));
            }
            if c.connecting_map_ok == Some(false) {
                out.push(format!(
                    "level {}: connecting map to level {} is not a surjective homomorphism",
                    c.level,
                    c.level.saturating_sub(1)
                ));
            }
        }
        out
    }
}

const ORDER_SEARCH_CAP: usize = 100_000;

/// Checks every level of `t` against the presentation `g`.
pub fn validate_tower(g: &GroupPresentation, t: &QuotientTower) -> TowerReport {
    let mut levels = Vec::new();
    for (i, level) in t.levels.iter().enumerate() {
        let generators_ok = level.generator_count() == g.rank();
        let failing_relators = if generators_ok {
            g.relators()
                .iter()
                .filter(|r| !level.word_permutation(r).is_ok_and(|p| p.is_identity()))
                .map(|r| r.display(g.generators()).to_string())
                .collect()
        } else {
            vec![]
        };
        let transitive = level.is_transitive();
        let regular = transitive && level.is_regular();
        let order = if regular {
            Some(level.degree as u64)
        } else {
            level.group_order(ORDER_SEARCH_CAP)
        };
        let connecting_map_ok = match (&t.connecting_maps, i) {
            (Some(maps), i) if i > 0 => Some(check_connecting_map(
                &maps[i - 1],
                level,
                &t.levels[i - 1],
            )),
            _ => None,
        };
        levels.push(LevelCheck {
            level: i,
            label: level.label,
            degree: level.degree,
            generators_ok,
            failing_relators,
            transitive,
            order,
            regular,
            connecting_map_ok,
        });
    }
    let degrees_monotone = t.levels.windows(2).all(|w| w[0].degree <= w[1].degree);
    let pass = degrees_monotone && levels.iter().all(LevelCheck::pass);
    TowerReport {
        levels,
        degrees_monotone,
        pass,
    }
}

fn check_connecting_map(map: &[u32], fine: &QuotientLevel, coarse: &QuotientLevel) -> bool {
    if fine.images.len() != coarse.images.len() || map.len() != fine.degree {
        return false;
    }
    if map.iter().any(|&x| x as usize >= coarse.degree) {
        return false;
    }
    let mut hit = vec![false; coarse.degree];
    for &x in map {
        hit[x as usize] = true;
    }
    if !hit.iter().all(|&h| h) {
        return false;
    }
    fine.images.iter().zip(&coarse.images).all(|(f, c)| {
        (0..fine.degree).all(|p| map[f.apply(p)] as usize == c.apply(map[p] as usize))
    })
}

impl fmt::Display for TowerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.levels {
            writeln!(
                f,
                "level {} (label {}, degree {}): relators {}, transitive {}, order {}, regular {}, connecting map {}",
                c.level,
                c.label,
                c.degree,
                if c.failing_relators.is_empty() { "ok" } else { "FAIL" },
                c.transitive,
                c.order.map_or_else(|| "unknown".to_string(), |o| o.to_string()),
                c.regular,
                match c.connecting_map_ok {
                    None => "n/a",
                    Some(true) => "ok",
                    Some(false) => "FAIL",
                }
            )?;
        }
        write!(f, "overall: {}", if self.pass { "pass" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_quotients_of_z_pass() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let t = QuotientTower::cyclic(&[2, 4, 8]).unwrap();
        let r = validate_tower(&g, &t);
        assert!(r.pass, "{r}");
        let orders: Vec<_> = r.levels.iter().map(|c| c.order.unwrap()).collect();
        assert_eq!(orders, vec![2, 4, 8]);
        assert!(r.levels[1..].iter().all(|c| c.connecting_map_ok == Some(true)));
    }

    #[test]
    fn grid_quotient_of_z2_passes() {
        let g = GroupPresentation::parse("gens a b; rels a b A B;").unwrap();
        let t = QuotientTower::grid(2, &[3]).unwrap();
        let r = validate_tower(&g, &t);
        assert!(r.pass);
        assert_eq!(r.levels[0].order, Some(9));
    }

    #[test]
    fn transposition_on_three_points_is_not_regular() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let level =
            QuotientLevel::new(3, 3, vec![Permutation::from_cycles("(0 1)", 3).unwrap()]).unwrap();
        let t = QuotientTower::new(vec![level], None).unwrap();
        let r = validate_tower(&g, &t);
        assert!(!r.pass);
        assert_eq!(r.levels[0].order, Some(2));
        assert!(!r.levels[0].regular);
        assert!(r.failures().iter().any(|m| m.contains("order 2 ≠ degree 3")));
    }

    #[test]
    fn failing_relator_is_named() {
        let g = GroupPresentation::parse("gens a; rels a^3;").unwrap();
        let t = QuotientTower::cyclic(&[3, 4]).unwrap();
        let r = validate_tower(&g, &t);
        assert!(!r.pass);
        assert!(r.levels[0].failing_relators.is_empty());
        assert_eq!(r.levels[1].failing_relators, vec!["a^3".to_string()]);
    }

    #[test]
    fn symmetric_group_regular_action_detected() {
        // S3 acting on itself: non-abelian regular action.
        let g = GroupPresentation::parse("gens s r; rels s^2, r^3, s r s r;").unwrap();
        // Elements indexed as r^i s^j -> i + 3j. Left multiplication.
        let mul = |(i1, j1): (usize, usize), (i2, j2): (usize, usize)| {
            // r^i1 s^j1 r^i2 s^j2 = r^(i1 + (-1)^j1 i2) s^(j1+j2)
            let i = if j1 == 0 { (i1 + i2) % 3 } else { (i1 + 3 - i2) % 3 };
            (i, (j1 + j2) % 2)
        };
        let idx = |(i, j): (usize, usize)| (i + 3 * j) as u32;
        let elems: Vec<(usize, usize)> = (0..6).map(|p| (p % 3, p / 3)).collect();
        let s: Vec<u32> = elems.iter().map(|&x| idx(mul((0, 1), x))).collect();
        let r: Vec<u32> = elems.iter().map(|&x| idx(mul((1, 0), x))).collect();
        let level = QuotientLevel::new(
            6,
            6,
            vec![
                Permutation::from_images(s).unwrap(),
                Permutation::from_images(r).unwrap(),
            ],
        )
        .unwrap();
        assert!(!level.is_abelian());
        assert!(level.is_regular());
        let t = QuotientTower::new(vec![level], None).unwrap();
        assert!(validate_tower(&g, &t).pass);
    }

    #[test]
    fn json_round_trip() {
        let g = GroupPresentation::parse("gens a b; rels a b A B;").unwrap();
        let t = QuotientTower::grid(2, &[2, 4]).unwrap();
        let again = QuotientTower::from_json(&t.to_json(&g), &g).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn json_accepts_image_arrays_and_cycles() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let t = QuotientTower::from_json(
            r#"{"levels":[{"degree":3,"images":{"a":[1,2,0]}},{"degree":4,"images":["(0 1 2 3)"]}]}"#,
            &g,
        )
        .unwrap();
        assert_eq!(t.levels()[0].images()[0].images(), &[1, 2, 0]);
        assert_eq!(t.levels()[1].images()[0].images(), &[1, 2, 3, 0]);
        assert!(validate_tower(&g, &t).pass);
    }

    #[test]
    fn bad_connecting_map_fails() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let levels = vec![
            QuotientLevel::cyclic(2).unwrap(),
            QuotientLevel::cyclic(4).unwrap(),
        ];
        let t = QuotientTower::new(levels, Some(vec![vec![0, 0, 1, 1]])).unwrap();
        let r = validate_tower(&g, &t);
        assert_eq!(r.levels[1].connecting_map_ok, Some(false));
        assert!(!r.pass);
    }
}
