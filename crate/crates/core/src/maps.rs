//! Combinatorial maps on closed oriented surfaces.
//!
//! A map is given by the boundary words of its faces, read counterclockwise,
//! over oriented edges `e` and `e^-1`. Every oriented edge appears exactly
//! once. Vertices are recovered by identifying the head of each boundary
//! letter with the tail of the next one.
//!
//! Map files hold one face per line, e.g. `a b a^-1 b^-1`. Text after `#` is
//! ignored.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::groups::GroupElement;

/// An edge traversed forwards (`e`) or backwards (`e^-1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrientedEdge {
    pub edge: usize,
    pub forward: bool,
}

impl OrientedEdge {
    pub fn new(edge: usize, forward: bool) -> Self {
        Self { edge, forward }
    }

    pub fn inverse(self) -> Self {
        Self {
            edge: self.edge,
            forward: !self.forward,
        }
    }

    // edge ends: 2e is the tail of +e, 2e+1 its head
    fn tail_end(self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }

    fn head_end(self) -> usize {
        2 * self.edge + usize::from(self.forward)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialMap {
    labels: Vec<String>,
    faces: Vec<Vec<OrientedEdge>>,
    /// vertex of each edge end
    ends: Vec<usize>,
    vertex_count: usize,
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn invalid<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::InvalidSurface {
        line,
        message: message.into(),
    })
}

fn format_symbol(label: &str, forward: bool) -> String {
    if forward {
        label.to_string()
    } else {
        format!("{label}^-1")
    }
}

fn parse_symbol(token: &str) -> Option<(&str, bool)> {
    let (label, forward) = match token.strip_suffix("^-1") {
        Some(l) => (l, false),
        None => (token.strip_suffix("^1").unwrap_or(token), true),
    };
    let valid = !label.is_empty() && label.chars().all(|c| c.is_alphanumeric() || c == '_');
    valid.then_some((label, forward))
}

/// Builds a map from face boundary words of (label, forward) symbols. Errors
/// report the 1-based face index as the line.
pub fn build_map<S: AsRef<str>>(faces: &[Vec<(S, bool)>]) -> Result<CombinatorialMap> {
    let numbered: Vec<(usize, Vec<(&str, bool)>)> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (i + 1, f.iter().map(|(l, o)| (l.as_ref(), *o)).collect()))
        .collect();
    build_numbered(&numbered)
}

fn build_numbered(faces: &[(usize, Vec<(&str, bool)>)]) -> Result<CombinatorialMap> {
    if faces.is_empty() {
        return invalid(0, "a map needs at least one face");
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    // line where each orientation was used
    let mut seen: Vec<[Option<usize>; 2]> = Vec::new();
    let mut words = Vec::with_capacity(faces.len());
    for (line, face) in faces {
        if face.is_empty() {
            return invalid(*line, "empty face boundary");
        }
        let mut word = Vec::with_capacity(face.len());
        for &(label, forward) in face {
            let e = *index.entry(label).or_insert_with(|| {
                labels.push(label.to_string());
                seen.push([None, None]);
                labels.len() - 1
            });
            let slot = &mut seen[e][usize::from(!forward)];
            if let Some(first) = slot {
                return invalid(
                    *line,
                    format!("symbol {} used twice (first on line {first})", format_symbol(label, forward)),
                );
            }
            *slot = Some(*line);
            word.push(OrientedEdge::new(e, forward));
        }
        words.push(word);
    }
    for (e, s) in seen.iter().enumerate() {
        match s {
            [Some(_), Some(_)] => {}
            [Some(line), None] => {
                return invalid(*line, format!("edge {} is missing its orientation {}", labels[e], format_symbol(&labels[e], false)))
            }
            [None, Some(line)] => {
                return invalid(*line, format!("edge {} is missing its orientation {}", labels[e], labels[e]))
            }
            [None, None] => unreachable!(),
        }
    }
    CombinatorialMap::from_words(labels, words, |f| faces[f].0)
}

impl CombinatorialMap {
    fn from_words(labels: Vec<String>, faces: Vec<Vec<OrientedEdge>>, line_of: impl Fn(usize) -> usize) -> Result<Self> {
        let edge_count = labels.len();
        let mut ends = DisjointSets::new(2 * edge_count);
        for face in &faces {
            for (i, &s) in face.iter().enumerate() {
                let next = face[(i + 1) % face.len()];
                ends.union(s.head_end(), next.tail_end());
            }
        }
        let mut vertex_of_root = HashMap::new();
        let mut vertex = vec![0; 2 * edge_count];
        for (end, v) in vertex.iter_mut().enumerate() {
            let root = ends.find(end);
            let next = vertex_of_root.len();
            *v = *vertex_of_root.entry(root).or_insert(next);
        }

        // faces are glued along shared edges; the result must be connected
        let mut face_of = vec![[0usize; 2]; edge_count];
        for (f, face) in faces.iter().enumerate() {
            for s in face {
                face_of[s.edge][usize::from(!s.forward)] = f;
            }
        }
        let mut comps = DisjointSets::new(faces.len());
        for [a, b] in &face_of {
            comps.union(*a, *b);
        }
        if let Some(f) = (0..faces.len()).find(|&f| comps.find(f) != comps.find(0)) {
            return invalid(line_of(f), "faces do not form a connected surface");
        }

        let map = Self {
            labels,
            faces,
            ends: vertex,
            vertex_count: vertex_of_root.len(),
        };
        let chi = map.euler_characteristic();
        if chi > 2 || chi % 2 != 0 {
            return invalid(0, format!("Euler characteristic {chi} is not that of a closed oriented surface"));
        }
        Ok(map)
    }

    /// Parses a map file: one face boundary per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut faces: Vec<(usize, Vec<(&str, bool)>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let mut word = Vec::new();
            for token in line.split_whitespace() {
                match parse_symbol(token) {
                    Some(sym) => word.push(sym),
                    None => return invalid(i + 1, format!("cannot parse edge symbol '{token}'")),
                }
            }
            faces.push((i + 1, word));
        }
        build_numbered(&faces)
    }

    /// The map file text of this map.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for face in &self.faces {
            let tokens: Vec<String> = face.iter().map(|s| self.symbol(*s)).collect();
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> u32 {
        ((2 - self.euler_characteristic()) / 2) as u32
    }

    pub fn faces(&self) -> &[Vec<OrientedEdge>] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[OrientedEdge] {
        &self.faces[f]
    }

    pub fn label(&self, edge: usize) -> &str {
        &self.labels[edge]
    }

    pub fn edge_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn symbol(&self, s: OrientedEdge) -> String {
        format_symbol(&self.labels[s.edge], s.forward)
    }

    pub fn tail(&self, s: OrientedEdge) -> usize {
        self.ends[s.tail_end()]
    }

    pub fn head(&self, s: OrientedEdge) -> usize {
        self.ends[s.head_end()]
    }

    /// Faces containing `+e` and `e^-1`.
    pub fn faces_of_edge(&self, edge: usize) -> (usize, usize) {
        let find = |forward: bool| {
            self.faces
                .iter()
                .position(|f| f.contains(&OrientedEdge::new(edge, forward)))
                .expect("every oriented edge lies on a face")
        };
        (find(true), find(false))
    }

    /// The boundary of face `f` as a loop based at the tail of its first letter.
    pub fn face_loop(&self, f: usize) -> LoopWord {
        let steps = self.faces[f].clone();
        LoopWord {
            base: self.tail(steps[0]),
            steps,
        }
    }

    /// Parses a word such as `a b^-1 c` over this map's edge labels.
    pub fn parse_word(&self, text: &str) -> Result<Vec<OrientedEdge>> {
        text.split_whitespace()
            .map(|token| {
                let (label, forward) = parse_symbol(token).ok_or_else(|| Error::InvalidPath(format!("cannot parse edge symbol '{token}'")))?;
                let edge = self
                    .edge_by_label(label)
                    .ok_or_else(|| Error::InvalidPath(format!("no edge labelled '{label}'")))?;
                Ok(OrientedEdge::new(edge, forward))
            })
            .collect()
    }

    /// Merges the two faces on either side of `edge`: if ∂f₁ = eα and
    /// ∂f₂ = βe⁻¹ the new face has boundary βα.
    pub fn remove_edge(&self, edge: usize) -> Result<Self> {
        if edge >= self.edge_count() {
            return Err(Error::Domain(format!("no edge with index {edge}")));
        }
        let (f1, f2) = self.faces_of_edge(edge);
        if f1 == f2 {
            return Err(Error::Domain(format!("edge {} borders a single face", self.labels[edge])));
        }
        if self.edge_count() == 1 {
            return Err(Error::Domain("removing the only edge leaves no map".into()));
        }
        let rotate_to = |face: &[OrientedEdge], target: OrientedEdge, to_front: bool| -> Vec<OrientedEdge> {
            let i = face.iter().position(|&s| s == target).unwrap();
            let n = face.len();
            if to_front {
                (0..n).map(|k| face[(i + k) % n]).collect()
            } else {
                (0..n).map(|k| face[(i + 1 + k) % n]).collect()
            }
        };
        let e = OrientedEdge::new(edge, true);
        let ea = rotate_to(&self.faces[f1], e, true);
        let be = rotate_to(&self.faces[f2], e.inverse(), false);
        let mut merged: Vec<OrientedEdge> = be[..be.len() - 1].to_vec();
        merged.extend_from_slice(&ea[1..]);

        let renumber = |s: OrientedEdge| OrientedEdge::new(if s.edge > edge { s.edge - 1 } else { s.edge }, s.forward);
        let keep = f1.min(f2);
        let mut faces = Vec::with_capacity(self.faces.len() - 1);
        for (f, face) in self.faces.iter().enumerate() {
            if f == keep {
                faces.push(merged.iter().copied().map(renumber).collect());
            } else if f != f1 && f != f2 {
                faces.push(face.iter().copied().map(renumber).collect());
            }
        }
        let mut labels = self.labels.clone();
        labels.remove(edge);
        Self::from_words(labels, faces, |f| f + 1)
    }
}

impl fmt::Display for CombinatorialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// One face [a₁, b₁][a₂, b₂]⋯[a_g, b_g] on a single vertex.
pub fn fundamental_map(genus: u32) -> Result<CombinatorialMap> {
    if genus == 0 {
        return Err(Error::Domain("fundamental maps need genus ≥ 1".into()));
    }
    let mut word = Vec::new();
    for i in 1..=genus {
        let (a, b) = (format!("a{i}"), format!("b{i}"));
        word.push((a.clone(), true));
        word.push((b.clone(), true));
        word.push((a, false));
        word.push((b, false));
    }
    build_map(&[word])
}

/// The torus cut into two triangles by a diagonal `c`: faces a b c⁻¹ and c a⁻¹ b⁻¹.
pub fn two_face_torus() -> CombinatorialMap {
    CombinatorialMap::parse("a b c^-1\nc a^-1 b^-1\n").expect("valid torus")
}

/// A path in a map: a start vertex and a sequence of head-to-tail edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    start: usize,
    steps: Vec<OrientedEdge>,
}

impl Path {
    pub fn new(map: &CombinatorialMap, start: usize, steps: Vec<OrientedEdge>) -> Result<Self> {
        if start >= map.vertex_count() {
            return Err(Error::InvalidPath(format!("no vertex {start}")));
        }
        let mut at = start;
        for (i, &s) in steps.iter().enumerate() {
            if s.edge >= map.edge_count() {
                return Err(Error::InvalidPath(format!("no edge with index {}", s.edge)));
            }
            if map.tail(s) != at {
                return Err(Error::InvalidPath(format!(
                    "step {} ({}) starts at vertex {} but the path is at vertex {at}",
                    i + 1,
                    map.symbol(s),
                    map.tail(s)
                )));
            }
            at = map.head(s);
        }
        Ok(Self { start, steps })
    }

    /// A path starting at the tail of its first step.
    pub fn from_steps(map: &CombinatorialMap, steps: Vec<OrientedEdge>) -> Result<Self> {
        let first = steps.first().ok_or_else(|| Error::InvalidPath("empty path has no start vertex".into()))?;
        if first.edge >= map.edge_count() {
            return Err(Error::InvalidPath(format!("no edge with index {}", first.edge)));
        }
        Self::new(map, map.tail(*first), steps)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self, map: &CombinatorialMap) -> usize {
        self.steps.last().map_or(self.start, |&s| map.head(s))
    }

    pub fn steps(&self) -> &[OrientedEdge] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// A closed path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopWord {
    base: usize,
    steps: Vec<OrientedEdge>,
}

impl LoopWord {
    pub fn new(map: &CombinatorialMap, base: usize, steps: Vec<OrientedEdge>) -> Result<Self> {
        let path = Path::new(map, base, steps)?;
        if path.end(map) != base {
            return Err(Error::InvalidPath(format!(
                "path from vertex {base} ends at vertex {} and is not a loop",
                path.end(map)
            )));
        }
        Ok(Self { base, steps: path.steps })
    }

    /// A loop based at the tail of its first step.
    pub fn from_steps(map: &CombinatorialMap, steps: Vec<OrientedEdge>) -> Result<Self> {
        let path = Path::from_steps(map, steps)?;
        Self::new(map, path.start, path.steps)
    }

    /// Parses a loop such as `a b a^-1 b^-1`.
    pub fn parse(map: &CombinatorialMap, text: &str) -> Result<Self> {
        Self::from_steps(map, map.parse_word(text)?)
    }

    /// The loop of length zero at `base`.
    pub fn constant(base: usize) -> Self {
        Self { base, steps: Vec::new() }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn steps(&self) -> &[OrientedEdge] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn as_path(&self) -> Path {
        Path {
            start: self.base,
            steps: self.steps.clone(),
        }
    }
}

/// How loops are reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    /// Free reduction and cancellation across the basepoint; the loop may move
    /// to a new base vertex.
    Cyclic,
    /// Free reduction keeping the basepoint.
    Based,
}

/// Deletes adjacent pairs e e⁻¹ until none remain.
pub fn reduce_word(map: &CombinatorialMap, w: &LoopWord, mode: Reduction) -> LoopWord {
    let mut stack: Vec<OrientedEdge> = Vec::with_capacity(w.steps.len());
    for &s in &w.steps {
        if stack.last() == Some(&s.inverse()) {
            stack.pop();
        } else {
            stack.push(s);
        }
    }
    let mut base = w.base;
    if mode == Reduction::Cyclic {
        let (mut lo, mut hi) = (0, stack.len());
        while hi - lo >= 2 && stack[lo] == stack[hi - 1].inverse() {
            base = map.head(stack[lo]);
            lo += 1;
            hi -= 1;
        }
        stack = stack[lo..hi].to_vec();
    }
    LoopWord { base, steps: stack }
}

/// ω(e₁)⋯ω(e_n), with ω(e⁻¹) = ω(e)⁻¹; `assignment` is indexed by edge.
pub fn holonomy<G: GroupElement>(steps: &[OrientedEdge], assignment: &[G]) -> Result<G> {
    let mut h = G::identity();
    for s in steps {
        let g = assignment
            .get(s.edge)
            .ok_or_else(|| Error::InvalidPath(format!("no group element assigned to edge {}", s.edge)))?;
        h = if s.forward { h.mul(g) } else { h.mul(&g.inverse()) };
    }
    Ok(h)
}

/// (j·ω)(e) = j(tail e)⁻¹ ω(e) j(head e), so a loop holonomy h based at v
/// becomes j(v)⁻¹ h j(v).
pub fn gauge_transform<G: GroupElement>(map: &CombinatorialMap, assignment: &[G], gauge: &[G]) -> Result<Vec<G>> {
    if assignment.len() != map.edge_count() || gauge.len() != map.vertex_count() {
        return Err(Error::Domain("assignment must cover every edge and gauge every vertex".into()));
    }
    Ok((0..map.edge_count())
        .map(|e| {
            let s = OrientedEdge::new(e, true);
            gauge[map.tail(s)].inverse().mul(&assignment[e]).mul(&gauge[map.head(s)])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Su2, U1};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // torus square with both sides subdivided, two chords, one chord subdivided
    pub(crate) const SEVEN_EDGE_TORUS: &str = "a1 a2 d^-1\nd c1 c2 b2^-1 b1^-1\nb1 b2 a2^-1 a1^-1 c2^-1 c1^-1\n";

    fn stats(m: &CombinatorialMap) -> (usize, usize, usize, u32) {
        (m.vertex_count(), m.edge_count(), m.face_count(), m.genus())
    }

    #[test]
    fn build_examples() {
        let torus = CombinatorialMap::parse("a b a^-1 b^-1").unwrap();
        assert_eq!(stats(&torus), (1, 2, 1, 1));
        let g2 = CombinatorialMap::parse("a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1").unwrap();
        assert_eq!(stats(&g2), (1, 4, 1, 2));
        let seven = CombinatorialMap::parse(SEVEN_EDGE_TORUS).unwrap();
        assert_eq!(stats(&seven), (4, 7, 3, 1));
        let sphere = CombinatorialMap::parse("a b\nb^-1 a^-1").unwrap();
        assert_eq!(stats(&sphere), (2, 2, 2, 0));
        let loop_sphere = CombinatorialMap::parse("a\na^-1").unwrap();
        assert_eq!(stats(&loop_sphere), (1, 1, 2, 0));
    }

    #[test]
    fn two_face_examples() {
        let m = two_face_torus();
        assert_eq!(stats(&m), (1, 3, 2, 1));
        let m = CombinatorialMap::parse("d\nd^-1 c^-1 a b a^-1 b^-1 c").unwrap();
        assert_eq!(stats(&m), (2, 4, 2, 1));
    }

    #[test]
    fn parse_errors_are_line_precise() {
        let err = CombinatorialMap::parse("a b a^-1 b^-1\n\n# comment\na").unwrap_err();
        assert!(matches!(err, Error::InvalidSurface { line: 4, .. }), "{err}");
        let err = CombinatorialMap::parse("a b\nb^-1 c c^-1").unwrap_err();
        assert!(matches!(err, Error::InvalidSurface { line: 1, .. }), "{err}");
        let err = CombinatorialMap::parse("a a^-1\nb b").unwrap_err();
        assert!(matches!(err, Error::InvalidSurface { line: 2, .. }), "{err}");
        let err = CombinatorialMap::parse("a a^-1\nb b^-1").unwrap_err();
        assert!(matches!(err, Error::InvalidSurface { line: 2, .. }), "{err}");
        let err = CombinatorialMap::parse("a b a^-1 b^-1\nx^-2").unwrap_err();
        assert!(matches!(err, Error::InvalidSurface { line: 2, .. }), "{err}");
        assert!(CombinatorialMap::parse("# nothing\n").is_err());
    }

    #[test]
    fn fundamental_maps() {
        for g in 1..=5 {
            let m = fundamental_map(g).unwrap();
            assert_eq!(stats(&m), (1, 2 * g as usize, 1, g));
            assert_eq!(m.euler_characteristic(), 2 - 2 * g as i64);
            let round = CombinatorialMap::parse(&m.to_text()).unwrap();
            assert_eq!(round, m);
        }
        assert_eq!(fundamental_map(3).unwrap().euler_characteristic(), -4);
        assert!(fundamental_map(0).is_err());
    }

    #[test]
    fn remove_diagonal_of_square() {
        let m = two_face_torus();
        let c = m.edge_by_label("c").unwrap();
        let square = m.remove_edge(c).unwrap();
        assert_eq!(stats(&square), (1, 2, 1, 1));
        assert_eq!(square.to_text().trim(), "a b a^-1 b^-1");
        assert!(square.remove_edge(0).is_err());
    }

    #[test]
    fn removal_preserves_euler_characteristic() {
        let mut maps = vec![CombinatorialMap::parse(SEVEN_EDGE_TORUS).unwrap(), two_face_torus()];
        for g in 1..=3 {
            maps.push(fundamental_map(g).unwrap());
        }
        for m in maps {
            for e in 0..m.edge_count() {
                let (f1, f2) = m.faces_of_edge(e);
                match m.remove_edge(e) {
                    Ok(r) => {
                        assert_ne!(f1, f2);
                        assert_eq!(r.euler_characteristic(), m.euler_characteristic());
                        assert_eq!(r.vertex_count(), m.vertex_count());
                        assert_eq!(r.edge_count(), m.edge_count() - 1);
                        assert_eq!(r.face_count(), m.face_count() - 1);
                    }
                    Err(_) => assert_eq!(f1, f2),
                }
            }
        }
    }

    #[test]
    fn removal_rule_on_two_faces() {
        let m = CombinatorialMap::parse("d\nd^-1 c^-1 a b a^-1 b^-1 c").unwrap();
        let d = m.edge_by_label("d").unwrap();
        let r = m.remove_edge(d).unwrap();
        assert_eq!(r.to_text().trim(), "c^-1 a b a^-1 b^-1 c");
        assert_eq!(stats(&r), (2, 3, 1, 1));
    }

    #[test]
    fn reduction_examples() {
        let m = CombinatorialMap::parse("a b a^-1 b^-1\n").unwrap();
        let w = LoopWord::parse(&m, "a a^-1").unwrap();
        assert!(reduce_word(&m, &w, Reduction::Cyclic).is_empty());
        let w = LoopWord::parse(&m, "a b a^-1 b^-1").unwrap();
        assert_eq!(reduce_word(&m, &w, Reduction::Cyclic), w);
        let t = two_face_torus();
        let w = LoopWord::parse(&t, "a b b^-1 a^-1 c c^-1").unwrap();
        assert!(reduce_word(&t, &w, Reduction::Based).is_empty());
        // cyclic cancellation across the basepoint
        let w = LoopWord::parse(&t, "a b a^-1").unwrap();
        let r = reduce_word(&t, &w, Reduction::Cyclic);
        assert_eq!(r.steps(), t.parse_word("b").unwrap().as_slice());
        assert_eq!(reduce_word(&t, &w, Reduction::Based), w);
    }

    #[test]
    fn paths_must_be_connected_and_closed() {
        let m = CombinatorialMap::parse(SEVEN_EDGE_TORUS).unwrap();
        assert!(LoopWord::parse(&m, "a1").is_err());
        assert!(LoopWord::parse(&m, "a1 a2").is_ok());
        assert!(Path::from_steps(&m, m.parse_word("a1 c1").unwrap()).is_err());
        assert!(m.parse_word("zz").is_err());
        for f in 0..m.face_count() {
            let l = m.face_loop(f);
            assert!(LoopWord::new(&m, l.base(), l.steps().to_vec()).is_ok());
        }
    }

    #[test]
    fn holonomy_examples() {
        let m = two_face_torus();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let omega: Vec<Su2> = (0..3).map(|_| Su2::haar(&mut rng)).collect();
        assert_eq!(holonomy(LoopWord::constant(0).steps(), &omega).unwrap(), Su2::identity());
        let h = holonomy(&m.parse_word("a b").unwrap(), &omega).unwrap();
        assert!(h.distance(&omega[0].mul(&omega[1])) < 1e-15);
        let h = holonomy(&m.parse_word("a^-1").unwrap(), &omega).unwrap();
        assert!(h.distance(&omega[0].inverse()) < 1e-15);
        assert!(holonomy(&m.parse_word("c").unwrap(), &omega[..2]).is_err());
        // abelian: commutator face is trivial
        let u: Vec<U1> = vec![U1::new(0.3), U1::new(1.2)];
        let sq = fundamental_map(1).unwrap();
        assert!(holonomy(sq.face(0), &u).unwrap().distance(&U1::identity()) < 1e-15);
    }

    #[test]
    fn gauge_conjugates_based_loops() {
        let m = CombinatorialMap::parse(SEVEN_EDGE_TORUS).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let omega: Vec<Su2> = (0..m.edge_count()).map(|_| Su2::haar(&mut rng)).collect();
            let j: Vec<Su2> = (0..m.vertex_count()).map(|_| Su2::haar(&mut rng)).collect();
            let moved = gauge_transform(&m, &omega, &j).unwrap();
            for f in 0..m.face_count() {
                let l = m.face_loop(f);
                let h = holonomy(l.steps(), &omega).unwrap();
                let hj = holonomy(l.steps(), &moved).unwrap();
                let v = l.base();
                let expected = j[v].inverse().mul(&h).mul(&j[v]);
                assert!(hj.distance(&expected) < 1e-12);
            }
        }
    }
}
