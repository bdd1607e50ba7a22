//! Permutations of `0..n` and permutation-group orders via Schreier-Sims.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Builds a permutation from its image list; `None` if it is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Self(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self` after `other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Perm(inv)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

struct Level {
    base: usize,
    generators: Vec<Perm>,
    /// `transversal[b]` maps `base` to `b`, for `b` in the basic orbit.
    transversal: Vec<Option<Perm>>,
}

impl Level {
    fn new(base: usize, n: usize) -> Self {
        let mut transversal = vec![None; n];
        transversal[base] = Some(Perm::identity(n));
        Self {
            base,
            generators: Vec::new(),
            transversal,
        }
    }

    fn rebuild_orbit(&mut self) {
        let n = self.transversal.len();
        self.transversal = vec![None; n];
        self.transversal[self.base] = Some(Perm::identity(n));
        let mut stack = vec![self.base];
        while let Some(b) = stack.pop() {
            let ub = self.transversal[b].clone().expect("orbit point");
            for g in &self.generators {
                let image = g.apply(b);
                if self.transversal[image].is_none() {
                    self.transversal[image] = Some(g.compose(&ub));
                    stack.push(image);
                }
            }
        }
    }

    fn orbit(&self) -> impl Iterator<Item = usize> + '_ {
        self.transversal.iter().enumerate().filter(|(_, t)| t.is_some()).map(|(b, _)| b)
    }
}

/// Stabilizer chain of a permutation group, grown incrementally.
pub struct PermGroup {
    n: usize,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn trivial(n: usize) -> Self {
        Self { n, levels: Vec::new() }
    }

    pub fn generated_by<'a>(n: usize, gens: impl IntoIterator<Item = &'a Perm>) -> Self {
        let mut group = Self::trivial(n);
        for g in gens {
            group.add_generator(g);
        }
        group
    }

    /// Sifts `g` from `level` down; returns the residue and the level where it stopped.
    fn sift(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for (idx, level) in self.levels.iter().enumerate().skip(from) {
            let b = h.apply(level.base);
            match &level.transversal[b] {
                Some(u) => h = u.inverse().compose(&h),
                None => return (h, idx),
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (residue, _) = self.sift(g, 0);
        residue.is_identity()
    }

    pub fn add_generator(&mut self, g: &Perm) {
        assert_eq!(g.len(), self.n);
        self.extend(0, g.clone());
    }

    /// Adds `g` (which fixes the base points of levels `< depth`) at `depth`.
    fn extend(&mut self, depth: usize, g: Perm) {
        let (residue, _) = self.sift(&g, depth);
        if residue.is_identity() {
            return;
        }
        if depth == self.levels.len() {
            let moved = (0..self.n).find(|&i| g.apply(i) != i).expect("non-identity");
            self.levels.push(Level::new(moved, self.n));
        }
        self.levels[depth].generators.push(g);
        self.levels[depth].rebuild_orbit();
        let level = &self.levels[depth];
        let mut schreier = Vec::new();
        for b in level.orbit() {
            let ub = level.transversal[b].as_ref().unwrap();
            for s in &level.generators {
                let image = s.apply(b);
                let u_image = level.transversal[image].as_ref().unwrap();
                let candidate = u_image.inverse().compose(&s.compose(ub));
                if !candidate.is_identity() {
                    schreier.push(candidate);
                }
            }
        }
        for s in schreier {
            self.extend(depth + 1, s);
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit().count() as u128).product()
    }
}
