//! Combinatorics of a decomposition into generalized pants: gluing graph,
//! spanning tree, presentation of the punctured surface group, and the
//! marking curves.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{CurveClass, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// Cone point with this index.
    Cone(usize),
    /// Pants curve with this index (appears in exactly two slots).
    Curve(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRef {
    pub block: usize,
    pub slot: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// Spanning-tree edge; `near` is the parent side.
    Tree,
    /// Extra edge with its stable letter.
    Hnn { generator: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Gluing {
    pub curve: usize,
    pub near: SlotRef,
    pub far: SlotRef,
    pub kind: EdgeKind,
}

/// One step of the walk that places blocks outward from the centre block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TreeStep {
    pub block: usize,
    pub parent: usize,
    pub curve: usize,
    /// The parent holds the near side of the gluing.
    pub forward: bool,
}

/// Marking data attached to one pants curve.
#[derive(Clone, Debug, Serialize)]
pub struct MarkedCurve {
    pub curve: CurveClass,
    /// Simple curve crossing the pants curve `crossings` times and no other pants curve.
    pub transversal: CurveClass,
    /// The transversal after one full twist about the pants curve; at twist `t`
    /// its length is the transversal's length at `t - length`.
    pub twisted: CurveClass,
    pub crossings: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct DecompositionSpec {
    blocks: Vec<[Slot; 3]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DecompositionSpec", into = "DecompositionSpec")]
pub struct BlockDecomposition {
    blocks: Vec<[Slot; 3]>,
    genus: usize,
    n_cones: usize,
    gluings: Vec<Gluing>,
    /// Blocks in breadth-first order from block 0.
    order: Vec<usize>,
    /// Tree edge (curve id) to the parent, for every block but the root.
    parent_edge: Vec<Option<usize>>,
    /// Spanning-tree walk from the block of least eccentricity. Holonomies are
    /// normalized there, which keeps the entries of long chains balanced.
    walk: Vec<TreeStep>,
    centre: usize,
    n_generators: usize,
    relators: Vec<Word>,
    peripherals: Vec<CurveClass>,
    marking: Vec<MarkedCurve>,
}

impl PartialEq for BlockDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }
}

impl TryFrom<DecompositionSpec> for BlockDecomposition {
    type Error = Error;
    fn try_from(s: DecompositionSpec) -> Result<Self> {
        BlockDecomposition::new(s.blocks)
    }
}

impl From<BlockDecomposition> for DecompositionSpec {
    fn from(d: BlockDecomposition) -> Self {
        DecompositionSpec { blocks: d.blocks }
    }
}

/// Generator index of end `slot` of `block`.
pub fn end_generator(block: usize, slot: usize) -> usize {
    3 * block + slot
}

fn end_word(r: SlotRef) -> Word {
    Word::gen(end_generator(r.block, r.slot))
}

fn next(slot: usize) -> usize {
    (slot + 1) % 3
}

fn prev(slot: usize) -> usize {
    (slot + 2) % 3
}

/// Breadth-first walks over tree edges from `root`.
fn tree_walk(n_blocks: usize, gluings: &[Gluing], root: usize) -> Vec<TreeStep> {
    let mut seen = vec![false; n_blocks];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut walk = Vec::with_capacity(n_blocks.saturating_sub(1));
    while let Some(b) = queue.pop_front() {
        for g in gluings.iter().filter(|g| g.kind == EdgeKind::Tree) {
            let (next, forward) = if g.near.block == b {
                (g.far.block, true)
            } else if g.far.block == b {
                (g.near.block, false)
            } else {
                continue;
            };
            if !seen[next] {
                seen[next] = true;
                walk.push(TreeStep { block: next, parent: b, curve: g.curve, forward });
                queue.push_back(next);
            }
        }
    }
    walk
}

fn centre_walk(n_blocks: usize, gluings: &[Gluing]) -> (usize, Vec<TreeStep>) {
    let depth = |walk: &[TreeStep], root: usize| {
        let mut d = vec![0usize; n_blocks];
        for st in walk {
            d[st.block] = d[st.parent] + 1;
        }
        d[root] = 0;
        d.into_iter().max().unwrap_or(0)
    };
    (0..n_blocks)
        .map(|r| (r, tree_walk(n_blocks, gluings, r)))
        .min_by_key(|(r, w)| (depth(w, *r), *r))
        .expect("at least one block")
}

impl BlockDecomposition {
    pub fn new(blocks: Vec<[Slot; 3]>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput("decomposition has no blocks".into()));
        }
        let mut curve_slots: Vec<Vec<SlotRef>> = Vec::new();
        let mut cone_slots: Vec<Vec<SlotRef>> = Vec::new();
        for (b, slots) in blocks.iter().enumerate() {
            for (k, s) in slots.iter().enumerate() {
                let (list, id) = match *s {
                    Slot::Cone(i) => (&mut cone_slots, i),
                    Slot::Curve(e) => (&mut curve_slots, e),
                };
                if id >= 4 * blocks.len() {
                    return Err(Error::InvalidInput(format!("slot index {id} out of range")));
                }
                if list.len() <= id {
                    list.resize(id + 1, Vec::new());
                }
                list[id].push(SlotRef { block: b, slot: k });
            }
        }
        for (i, v) in cone_slots.iter().enumerate() {
            if v.len() != 1 {
                return Err(Error::InvalidInput(format!("cone point {i} appears in {} slots, expected 1", v.len())));
            }
        }
        for (e, v) in curve_slots.iter().enumerate() {
            if v.len() != 2 {
                return Err(Error::InvalidInput(format!("curve {e} appears in {} slots, expected 2", v.len())));
            }
        }
        let n_blocks = blocks.len();
        let n_cones = cone_slots.len();
        let n_curves = curve_slots.len();
        // Euler characteristic of the punctured surface is -n_blocks.
        let two_g = 2 + n_blocks as i64 - n_cones as i64;
        if two_g < 0 || two_g % 2 != 0 {
            return Err(Error::InvalidInput("slot counts do not describe a closed surface".into()));
        }
        if n_curves == 0 {
            return Err(Error::InvalidInput("decomposition has no pants curves (6g - 6 + 2n = 0)".into()));
        }

        let other = |e: usize, r: SlotRef| -> SlotRef {
            let v = &curve_slots[e];
            if v[0] == r {
                v[1]
            } else {
                v[0]
            }
        };

        let mut seen = vec![false; n_blocks];
        let mut parent_edge = vec![None; n_blocks];
        let mut order = Vec::with_capacity(n_blocks);
        let mut gluings: Vec<Option<Gluing>> = vec![None; n_curves];
        let mut n_generators = 3 * n_blocks;
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(b) = queue.pop_front() {
            order.push(b);
            for k in 0..3 {
                let Slot::Curve(e) = blocks[b][k] else { continue };
                if gluings[e].is_some() {
                    continue;
                }
                let near = SlotRef { block: b, slot: k };
                let far = other(e, near);
                let kind = if !seen[far.block] {
                    seen[far.block] = true;
                    parent_edge[far.block] = Some(e);
                    queue.push_back(far.block);
                    EdgeKind::Tree
                } else {
                    n_generators += 1;
                    EdgeKind::Hnn { generator: n_generators - 1 }
                };
                gluings[e] = Some(Gluing { curve: e, near, far, kind });
            }
        }
        if order.len() != n_blocks {
            return Err(Error::InvalidInput("gluing graph is not connected".into()));
        }
        let gluings: Vec<Gluing> = gluings.into_iter().map(|g| g.expect("every curve is glued")).collect();
        let (centre, walk) = centre_walk(n_blocks, &gluings);

        let mut relators = Vec::new();
        for b in 0..n_blocks {
            relators.push(Word((0..3).map(|k| end_generator(b, k) as i32 + 1).collect()));
        }
        for g in &gluings {
            let w = match g.kind {
                EdgeKind::Tree => end_word(g.far).concat(&end_word(g.near)),
                EdgeKind::Hnn { generator } => end_word(g.far).conjugate(&Word::gen(generator)).concat(&end_word(g.near)),
            };
            relators.push(w);
        }

        let peripherals = cone_slots
            .iter()
            .enumerate()
            .map(|(i, v)| CurveClass { word: end_word(v[0]), simple: true, peripheral: Some(i) })
            .collect();

        let marking = gluings
            .iter()
            .map(|g| {
                let c = end_word(g.near);
                let x = end_word(SlotRef { block: g.near.block, slot: prev(g.near.slot) });
                let y_local = end_word(SlotRef { block: g.far.block, slot: next(g.far.slot) });
                let (transversal, twisted, crossings) = match g.kind {
                    EdgeKind::Tree => {
                        (x.concat(&y_local), x.concat(&y_local.conjugate(&c)), 2)
                    }
                    EdgeKind::Hnn { generator } if g.near.block != g.far.block => {
                        let y = y_local.conjugate(&Word::gen(generator));
                        (x.concat(&y), x.concat(&y.conjugate(&c)), 2)
                    }
                    EdgeKind::Hnn { generator } => {
                        let s = Word::gen(generator);
                        (s.clone(), s.concat(&c), 1)
                    }
                };
                MarkedCurve {
                    curve: CurveClass::simple(c),
                    transversal: CurveClass::simple(transversal),
                    twisted: CurveClass::simple(twisted),
                    crossings,
                }
            })
            .collect();

        Ok(BlockDecomposition {
            blocks,
            genus: (two_g / 2) as usize,
            n_cones,
            gluings,
            order,
            parent_edge,
            walk,
            centre,
            n_generators,
            relators,
            peripherals,
            marking,
        })
    }

    /// Sphere with `n >= 4` cone points as a chain of blocks.
    pub fn cone_sphere(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidInput("a cone sphere needs at least four cone points".into()));
        }
        let mut blocks = vec![[Slot::Cone(0), Slot::Cone(1), Slot::Curve(0)]];
        for k in 0..n - 4 {
            blocks.push([Slot::Curve(k), Slot::Cone(k + 2), Slot::Curve(k + 1)]);
        }
        blocks.push([Slot::Curve(n - 4), Slot::Cone(n - 2), Slot::Cone(n - 1)]);
        BlockDecomposition::new(blocks)
    }

    /// Torus with one cone point: one block glued to itself.
    pub fn one_cone_torus() -> Self {
        BlockDecomposition::new(vec![[Slot::Curve(0), Slot::Curve(0), Slot::Cone(0)]])
            .expect("one-cone torus is a valid decomposition")
    }

    /// Closed genus-2 surface from two pants.
    pub fn genus_two() -> Self {
        BlockDecomposition::new(vec![
            [Slot::Curve(0), Slot::Curve(1), Slot::Curve(2)],
            [Slot::Curve(2), Slot::Curve(1), Slot::Curve(0)],
        ])
        .expect("genus-2 decomposition is valid")
    }

    pub fn blocks(&self) -> &[[Slot; 3]] {
        &self.blocks
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn n_cones(&self) -> usize {
        self.n_cones
    }

    pub fn n_curves(&self) -> usize {
        self.gluings.len()
    }

    pub fn n_generators(&self) -> usize {
        self.n_generators
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64
    }

    /// Real dimension 6g - 6 + 2n of the Teichmuller space.
    pub fn dimension(&self) -> usize {
        2 * self.n_curves()
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn gluing(&self, curve: usize) -> &Gluing {
        &self.gluings[curve]
    }

    pub fn bfs_order(&self) -> &[usize] {
        &self.order
    }

    pub fn parent_edge(&self, block: usize) -> Option<usize> {
        self.parent_edge[block]
    }

    /// The block placed at the identity.
    pub fn centre(&self) -> usize {
        self.centre
    }

    /// Every block but the centre, each after its parent.
    pub fn frame_walk(&self) -> &[TreeStep] {
        &self.walk
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn peripherals(&self) -> &[CurveClass] {
        &self.peripherals
    }

    pub fn marking(&self) -> &[MarkedCurve] {
        &self.marking
    }

    pub fn pants_curve(&self, curve: usize) -> &CurveClass {
        &self.marking[curve].curve
    }

    /// Pants curves, transversals and twisted transversals, in curve order.
    pub fn determining_system(&self) -> Vec<CurveClass> {
        self.marking
            .iter()
            .flat_map(|m| [m.curve.clone(), m.transversal.clone(), m.twisted.clone()])
            .collect()
    }

    /// Pants curve index of a class, if the word is (a cyclic conjugate of) a
    /// pants curve or its inverse.
    pub fn pants_curve_index(&self, gamma: &CurveClass) -> Option<usize> {
        let w = gamma.word.cyclically_reduced();
        self.marking.iter().position(|m| {
            let c = &m.curve.word;
            w == *c || w == c.inverse()
        })
    }

    /// Geometric intersection number of `gamma` with pants curve `curve`, known
    /// for the marking curves (up to inversion and cyclic rotation).
    pub fn intersection(&self, gamma: &CurveClass, curve: usize) -> Result<u32> {
        let w = gamma.word.cyclically_reduced();
        let same = |c: &Word| cyclic_eq(&w, c) || cyclic_eq(&w, &c.inverse());
        for (e, m) in self.marking.iter().enumerate() {
            if same(&m.curve.word) {
                return Ok(0);
            }
            if same(&m.transversal.word) || same(&m.twisted.word) {
                return Ok(if e == curve { m.crossings } else { 0 });
            }
        }
        Err(Error::Unsupported(format!("intersection number of {gamma} with pants curves is not known")))
    }

    /// Generator images of the automorphism `phi` with
    /// `rho_(t + n l)(w) = rho_t(phi(w))`, where only the twist of `curve`
    /// changes: `n` full twists along it.
    pub fn twist_automorphism(&self, curve: usize, n: i32) -> Vec<Word> {
        let g = &self.gluings[curve];
        let c = end_word(g.near);
        let power = |k: i32| if k >= 0 { c.pow(k as u32) } else { c.inverse().pow(k.unsigned_abs()) };
        let shift = power(-n);
        let mut images = self.generator_words();
        match g.kind {
            EdgeKind::Hnn { generator } => images[generator] = shift.concat(&images[generator]),
            EdgeKind::Tree => {
                let below = |mut b: usize| loop {
                    match self.parent_edge[b] {
                        Some(e) if e == curve => return true,
                        Some(e) => b = self.gluings[e].near.block,
                        None => return false,
                    }
                };
                for b in (0..self.blocks.len()).filter(|&b| below(b)) {
                    for k in 0..3 {
                        let i = end_generator(b, k);
                        images[i] = images[i].conjugate(&shift);
                    }
                }
                for h in &self.gluings {
                    if let EdgeKind::Hnn { generator } = h.kind {
                        let mut w = images[generator].clone();
                        if below(h.near.block) {
                            w = shift.concat(&w);
                        }
                        if below(h.far.block) {
                            w = w.concat(&shift.inverse());
                        }
                        images[generator] = w;
                    }
                }
            }
        }
        images
    }

    /// Words for the end generators of `block` and the stable letters, used
    /// by enumeration routines.
    pub fn generator_words(&self) -> Vec<Word> {
        (0..self.n_generators).map(Word::gen).collect()
    }
}

fn cyclic_eq(a: &Word, b: &Word) -> bool {
    let b = b.cyclically_reduced();
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let n = a.len();
    (0..n).any(|r| (0..n).all(|i| a.0[(i + r) % n] == b.0[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cone_sphere_structure() {
        let d = BlockDecomposition::cone_sphere(4).unwrap();
        assert_eq!(d.genus(), 0);
        assert_eq!(d.n_cones(), 4);
        assert_eq!(d.n_curves(), 1);
        assert_eq!(d.n_generators(), 6);
        assert_eq!(d.dimension(), 6 * 0 + 2 * 4 - 6);
        assert_eq!(d.relators().len(), 3);
        let m = &d.marking()[0];
        assert_eq!(m.crossings, 2);
        assert_eq!(d.intersection(&m.transversal, 0).unwrap(), 2);
        assert_eq!(d.intersection(&m.curve, 0).unwrap(), 0);
        assert!(d.intersection(&CurveClass::new(Word(vec![1, 4, 4])), 0).is_err());
    }

    #[test]
    fn torus_and_genus_two() {
        let t = BlockDecomposition::one_cone_torus();
        assert_eq!((t.genus(), t.n_cones(), t.n_curves(), t.n_generators()), (1, 1, 1, 4));
        assert_eq!(t.marking()[0].crossings, 1);
        let g = BlockDecomposition::genus_two();
        assert_eq!((g.genus(), g.n_cones(), g.n_curves()), (2, 0, 3));
        assert_eq!(g.dimension(), 6);
        let five = BlockDecomposition::cone_sphere(5).unwrap();
        assert_eq!((five.genus(), five.n_curves()), (0, 2));
    }

    #[test]
    fn invalid_decompositions() {
        assert!(BlockDecomposition::new(vec![]).is_err());
        assert!(BlockDecomposition::new(vec![[Slot::Cone(0), Slot::Cone(1), Slot::Curve(0)]]).is_err());
        assert!(BlockDecomposition::new(vec![[Slot::Cone(0), Slot::Cone(1), Slot::Cone(2)]]).is_err());
        let disconnected = vec![
            [Slot::Curve(0), Slot::Curve(0), Slot::Cone(0)],
            [Slot::Curve(1), Slot::Curve(1), Slot::Cone(1)],
        ];
        assert!(BlockDecomposition::new(disconnected).is_err());
    }

    #[test]
    fn serde_keeps_only_blocks() {
        let d = BlockDecomposition::cone_sphere(5).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"blocks":[[{"cone":0},{"cone":1},{"curve":0}],[{"curve":0},{"cone":2},{"curve":1}],[{"curve":1},{"cone":3},{"cone":4}]]}"#);
        let back: BlockDecomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
