//! Rooted, non-planar, edge-colored trees with two kinds of leaves
//! (snaky = genuine inputs, labeled; straight = algebra-fed slots),
//! their canonical forms, automorphism groups, grafting and contraction,
//! and the structural predicates the filtrations select by.
//!
//! Non-planarity is handled by canonical sorting of children; a groupoid is
//! modeled by one canonical representative per class plus its automorphism
//! group, with snaky leaves fixed pointwise (the slice over a profile).

use std::collections::BTreeMap;

use crate::error::Error;
use crate::perm::{FiniteGroup, Perm};
use crate::profile::{Color, Profile};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Node {
    /// An inner vertex with the given output color; the color of the edge to
    /// each child is the child's own (output) color.
    Vertex { color: Color, children: Vec<Node> },
    /// A labeled input leaf; labels run 1..k over the whole tree.
    Snaky { color: Color, label: usize },
    /// An unlabeled slot to be fed by an algebra/family element.
    Straight { color: Color },
}

impl Node {
    pub fn color(&self) -> &Color {
        match self {
            Node::Vertex { color, .. } | Node::Snaky { color, .. } | Node::Straight { color } => color,
        }
    }

    fn count_nodes(&self) -> usize {
        match self {
            Node::Vertex { children, .. } => 1 + children.iter().map(|c| c.count_nodes()).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Address of a node: the path of child indices from the root.
pub type Path = Vec<usize>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Tree {
    pub root: Node,
}

impl Tree {
    pub fn new(root: Node) -> Self {
        Tree { root }
    }

    /// The one-vertex tree with the given boundary snaky leaves (labeled in
    /// order 1..k) and the given straight leaf colors.
    pub fn corolla(boundary: &Profile, straight: &[Color]) -> Tree {
        let mut children: Vec<Node> = boundary
            .inputs
            .iter()
            .enumerate()
            .map(|(i, c)| Node::Snaky { color: c.clone(), label: i + 1 })
            .collect();
        children.extend(straight.iter().map(|c| Node::Straight { color: c.clone() }));
        Tree::new(Node::Vertex { color: boundary.output.clone(), children }).canonical()
    }

    /// The vertex-free tree consisting of a single snaky edge.
    pub fn bare_snaky(color: impl Into<Color>) -> Tree {
        Tree::new(Node::Snaky { color: color.into(), label: 1 })
    }

    /// The vertex-free tree consisting of a single straight edge.
    pub fn bare_straight(color: impl Into<Color>) -> Tree {
        Tree::new(Node::Straight { color: color.into() })
    }

    pub fn is_bare(&self) -> bool {
        !matches!(self.root, Node::Vertex { .. })
    }

    pub fn node_count(&self) -> usize {
        self.root.count_nodes()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().len()
    }

    pub fn height(&self) -> usize {
        fn h(n: &Node) -> usize {
            match n {
                Node::Vertex { children, .. } => {
                    children.iter().filter(|c| matches!(c, Node::Vertex { .. })).map(h).max().map_or(0, |m| m + 1)
                }
                _ => 0,
            }
        }
        h(&self.root)
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&Node> {
        let mut cur = &self.root;
        for &i in path {
            match cur {
                Node::Vertex { children, .. } => cur = children.get(i)?,
                _ => return None,
            }
        }
        Some(cur)
    }

    /// Pre-order list of vertex addresses.
    pub fn vertices(&self) -> Vec<Path> {
        let mut out = vec![];
        collect(&self.root, &mut vec![], &mut |n, p| {
            if matches!(n, Node::Vertex { .. }) {
                out.push(p.clone());
            }
        });
        out
    }

    /// Pre-order list of straight-leaf addresses.
    pub fn straight_leaves(&self) -> Vec<Path> {
        let mut out = vec![];
        collect(&self.root, &mut vec![], &mut |n, p| {
            if matches!(n, Node::Straight { .. }) {
                out.push(p.clone());
            }
        });
        out
    }

    /// Snaky-leaf addresses sorted by label.
    pub fn snaky_leaves(&self) -> Vec<(usize, Path)> {
        let mut out = vec![];
        collect(&self.root, &mut vec![], &mut |n, p| {
            if let Node::Snaky { label, .. } = n {
                out.push((*label, p.clone()));
            }
        });
        out.sort();
        out
    }

    /// Pre-order list of every node address.
    pub fn all_nodes(&self) -> Vec<Path> {
        let mut out = vec![];
        collect(&self.root, &mut vec![], &mut |_, p| out.push(p.clone()));
        out
    }

    /// The boundary profile: snaky colors by label, root color as output.
    pub fn boundary(&self) -> Profile {
        let snaky = self.snaky_leaves();
        Profile::new(
            snaky
                .iter()
                .map(|(_, p)| self.node_at(p).unwrap().color().clone())
                .collect(),
            self.root.color().clone(),
        )
    }

    /// Check structural invariants: snaky labels are a bijection onto 1..k.
    pub fn validate(&self) -> Result<(), Error> {
        let snaky = self.snaky_leaves();
        for (expect, (label, _)) in snaky.iter().enumerate() {
            if *label != expect + 1 {
                return Err(Error::invalid(format!(
                    "snaky labels must be a bijection onto 1..{}, found {label}",
                    snaky.len()
                )));
            }
        }
        Ok(())
    }

    /// Canonical representative of the isomorphism class (children sorted
    /// recursively). Idempotent.
    pub fn canonical(&self) -> Tree {
        fn sort(n: &Node) -> Node {
            match n {
                Node::Vertex { color, children } => {
                    let mut kids: Vec<Node> = children.iter().map(sort).collect();
                    kids.sort();
                    Node::Vertex { color: color.clone(), children: kids }
                }
                other => other.clone(),
            }
        }
        Tree::new(sort(&self.root))
    }

    pub fn is_canonical(&self) -> bool {
        self == &self.canonical()
    }

    /// Canonicalize and return, for every node of `self`, its address in the
    /// canonical tree.
    pub fn canonical_with_map(&self) -> (Tree, BTreeMap<Path, Path>) {
        fn go(n: &Node, here: &Path, map: &mut BTreeMap<Path, Path>, there: &Path) -> Node {
            map.insert(here.clone(), there.clone());
            match n {
                Node::Vertex { color, children } => {
                    let sorted_kids: Vec<(usize, Node)> = {
                        let mut tagged: Vec<(usize, Node)> = children
                            .iter()
                            .enumerate()
                            .map(|(i, c)| (i, Tree::new(c.clone()).canonical().root))
                            .collect();
                        tagged.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
                        tagged
                    };
                    let mut new_children = vec![];
                    for (slot, (orig_idx, _)) in sorted_kids.iter().enumerate() {
                        let mut h = here.clone();
                        h.push(*orig_idx);
                        let mut t = there.clone();
                        t.push(slot);
                        new_children.push(go(&children[*orig_idx], &h, map, &t));
                    }
                    Node::Vertex { color: color.clone(), children: new_children }
                }
                other => other.clone(),
            }
        }
        let mut map = BTreeMap::new();
        let root = go(&self.root, &vec![], &mut map, &vec![]);
        (Tree::new(root), map)
    }

    /// Automorphism group acting on the pre-order node indexing. With
    /// `fix_snaky`, snaky labels are respected (the slice-groupoid group);
    /// otherwise labels are ignored. Requires canonical input.
    pub fn automorphisms(&self, fix_snaky: bool) -> FiniteGroup {
        assert!(self.is_canonical(), "automorphisms requires a canonical tree");
        let nodes = self.all_nodes();
        let index: BTreeMap<Path, usize> = nodes.iter().cloned().zip(0..).collect();
        let n = nodes.len();
        let mut gens: Vec<Perm> = vec![];
        // swap generators for adjacent equal siblings, recursively
        let mut stack: Vec<Path> = vec![vec![]];
        while let Some(p) = stack.pop() {
            let Some(Node::Vertex { children, .. }) = self.node_at(&p) else {
                continue;
            };
            for (i, _) in children.iter().enumerate() {
                let mut cp = p.clone();
                cp.push(i);
                stack.push(cp);
            }
            for i in 0..children.len().saturating_sub(1) {
                let equal = if fix_snaky {
                    children[i] == children[i + 1]
                } else {
                    strip_labels(&children[i]) == strip_labels(&children[i + 1])
                };
                if equal {
                    // swap the node blocks of children i and i+1
                    let mut map: Vec<usize> = (0..n).collect();
                    let mut pa = p.clone();
                    pa.push(i);
                    let mut pb = p.clone();
                    pb.push(i + 1);
                    let sub_a = subtree_paths(self, &pa);
                    let sub_b = subtree_paths(self, &pb);
                    assert_eq!(sub_a.len(), sub_b.len());
                    for (a, b) in sub_a.iter().zip(&sub_b) {
                        map[index[a]] = index[b];
                        map[index[b]] = index[a];
                    }
                    gens.push(Perm::from_vec(map).unwrap());
                }
            }
        }
        FiniteGroup::generated(n, gens).expect("tree automorphism group")
    }

    /// Graft trees onto straight leaves: `assignments` maps straight-leaf
    /// addresses to replacement trees whose root color must match.
    /// Does not canonicalize; the caller decides when to.
    pub fn graft(&self, assignments: &BTreeMap<Path, Tree>) -> Result<Tree, Error> {
        for (p, t) in assignments {
            match self.node_at(p) {
                Some(Node::Straight { color }) => {
                    if t.root.color() != color {
                        return Err(Error::invalid(format!(
                            "graft color mismatch at {p:?}: slot {color}, tree {}",
                            t.root.color()
                        )));
                    }
                }
                _ => return Err(Error::invalid(format!("graft target {p:?} is not a straight leaf"))),
            }
        }
        fn go(n: &Node, here: &mut Path, assignments: &BTreeMap<Path, Tree>) -> Node {
            if let Some(t) = assignments.get(here) {
                return t.root.clone();
            }
            match n {
                Node::Vertex { color, children } => {
                    let mut kids = vec![];
                    for (i, c) in children.iter().enumerate() {
                        here.push(i);
                        kids.push(go(c, here, assignments));
                        here.pop();
                    }
                    Node::Vertex { color: color.clone(), children: kids }
                }
                other => other.clone(),
            }
        }
        Ok(Tree::new(go(&self.root, &mut vec![], assignments)))
    }

    /// Contract the inner edge above the vertex at `path` (which must be a
    /// non-root vertex whose parent is a vertex): the child vertex is merged
    /// into its parent, its children spliced in place of the edge slot.
    pub fn contract_edge(&self, path: &[usize]) -> Result<Tree, Error> {
        if path.is_empty() {
            return Err(Error::invalid("cannot contract at the root"));
        }
        match self.node_at(path) {
            Some(Node::Vertex { .. }) => {}
            _ => return Err(Error::invalid("contraction target is not an inner vertex")),
        }
        fn go(n: &Node, path: &[usize]) -> Node {
            let Node::Vertex { color, children } = n else { unreachable!() };
            let mut kids = vec![];
            for (i, c) in children.iter().enumerate() {
                if i == path[0] {
                    if path.len() == 1 {
                        let Node::Vertex { children: inner, .. } = c else { unreachable!() };
                        kids.extend(inner.iter().cloned());
                    } else {
                        kids.push(go(c, &path[1..]));
                    }
                } else {
                    kids.push(c.clone());
                }
            }
            Node::Vertex { color: color.clone(), children: kids }
        }
        Ok(Tree::new(go(&self.root, path)))
    }

    /// Height of a vertex = its depth from the root vertex.
    pub fn level_of(&self, path: &[usize]) -> usize {
        path.len()
    }

    /// Does this leveled tree contain one of the two forbidden shapes?
    /// Shape A: an odd vertex one of whose children is a vertex all of whose
    /// children are straight leaves (possibly none). Shape B: an odd
    /// leafless vertex whose parent vertex has no other children except
    /// straight leaves.
    pub fn detect_forbidden(&self) -> bool {
        let verts = self.vertices();
        for p in &verts {
            let Node::Vertex { children, .. } = self.node_at(p).unwrap() else { unreachable!() };
            let odd = p.len() % 2 == 1;
            if odd {
                // shape A
                for c in children {
                    if let Node::Vertex { children: cc, .. } = c {
                        if cc.iter().all(|k| matches!(k, Node::Straight { .. })) {
                            return true;
                        }
                    }
                }
                // shape B: leafless odd vertex under a parent whose other
                // children are all straight leaves
                let leafless = children.iter().all(|k| matches!(k, Node::Vertex { .. }));
                if leafless && !p.is_empty() {
                    let parent = &p[..p.len() - 1];
                    let Node::Vertex { children: siblings, .. } = self.node_at(parent).unwrap() else {
                        unreachable!()
                    };
                    let me = p[p.len() - 1];
                    if siblings
                        .iter()
                        .enumerate()
                        .all(|(i, s)| i == me || matches!(s, Node::Straight { .. }))
                    {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Debug notation: `d(c~1,b!,e(a~2))`, `~` snaky with label, `!` straight.
    pub fn notation(&self) -> String {
        fn go(n: &Node, out: &mut String) {
            match n {
                Node::Snaky { color, label } => {
                    out.push_str(color);
                    out.push('~');
                    out.push_str(&label.to_string());
                }
                Node::Straight { color } => {
                    out.push_str(color);
                    out.push('!');
                }
                Node::Vertex { color, children } => {
                    out.push_str(color);
                    out.push('(');
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(c, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(&self.root, &mut s);
        s
    }

    pub fn parse(input: &str) -> Result<Tree, Error> {
        let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let mut chars = cleaned.chars().peekable();
        let node = parse_node(&mut chars)?;
        if chars.peek().is_some() {
            return Err(Error::Parse(format!("trailing input in tree notation: {input}")));
        }
        let t = Tree::new(node);
        t.validate()?;
        Ok(t)
    }
}

fn parse_node(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<Node, Error> {
    let mut name = String::new();
    while let Some(&c) = chars.peek() {
        if c == '(' || c == '~' || c == '!' || c == ',' || c == ')' {
            break;
        }
        name.push(c);
        chars.next();
    }
    if name.is_empty() {
        return Err(Error::Parse("expected a color".into()));
    }
    match chars.peek() {
        Some('~') => {
            chars.next();
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let label: usize = digits.parse().map_err(|_| Error::Parse("snaky label".into()))?;
            Ok(Node::Snaky { color: name, label })
        }
        Some('!') => {
            chars.next();
            Ok(Node::Straight { color: name })
        }
        Some('(') => {
            chars.next();
            let mut children = vec![];
            if chars.peek() == Some(&')') {
                chars.next();
            } else {
                loop {
                    children.push(parse_node(chars)?);
                    match chars.next() {
                        Some(',') => continue,
                        Some(')') => break,
                        _ => return Err(Error::Parse("expected , or )".into())),
                    }
                }
            }
            Ok(Node::Vertex { color: name, children })
        }
        _ => Err(Error::Parse(format!("expected ~, ! or ( after {name}"))),
    }
}

fn collect<'a>(n: &'a Node, path: &mut Path, f: &mut impl FnMut(&'a Node, &Path)) {
    f(n, path);
    if let Node::Vertex { children, .. } = n {
        for (i, c) in children.iter().enumerate() {
            path.push(i);
            collect(c, path, f);
            path.pop();
        }
    }
}

fn subtree_paths(t: &Tree, at: &Path) -> Vec<Path> {
    let node = t.node_at(at).unwrap();
    let mut out = vec![];
    let mut prefix = at.clone();
    collect(node, &mut prefix, &mut |_, p| out.push(p.clone()));
    out
}

fn strip_labels(n: &Node) -> Node {
    match n {
        Node::Vertex { color, children } => Node::Vertex {
            color: color.clone(),
            children: children.iter().map(strip_labels).collect(),
        },
        Node::Snaky { color, .. } => Node::Snaky { color: color.clone(), label: 0 },
        other => other.clone(),
    }
}

/// Structural predicate bundle for tree enumeration.
#[derive(Clone, Debug, Default)]
pub struct TreeConstraint {
    pub max_height: Option<usize>,
    pub max_vertices: Option<usize>,
    /// all leaves must be snaky
    pub leaves_all_snaky: bool,
    /// no vertex whose children are all straight leaves (including 0-ary)
    pub no_straight_corollas: bool,
    /// required number of odd-level vertices
    pub odd_vertices: Option<usize>,
    /// odd-level vertices have no leaf children
    pub odd_leafless: bool,
    /// vertices without inner-edge children sit at even levels
    pub external_even: bool,
    /// reject trees containing a forbidden subtree
    pub no_forbidden: bool,
    /// snaky leaves allowed only at this level (leaf level = vertex level + 1)
    pub snaky_level: Option<usize>,
    /// straight leaves allowed only at this level
    pub straight_level: Option<usize>,
    /// cap on straight leaves
    pub max_straight: Option<usize>,
}

impl TreeConstraint {
    pub fn satisfied_by(&self, t: &Tree) -> bool {
        if let Some(h) = self.max_height {
            if t.height() > h {
                return false;
            }
        }
        if let Some(v) = self.max_vertices {
            if t.vertex_count() > v {
                return false;
            }
        }
        if self.leaves_all_snaky && !t.straight_leaves().is_empty() {
            return false;
        }
        if let Some(ms) = self.max_straight {
            if t.straight_leaves().len() > ms {
                return false;
            }
        }
        if self.no_straight_corollas {
            for p in t.vertices() {
                let Some(Node::Vertex { children, .. }) = t.node_at(&p) else { unreachable!() };
                if children.iter().all(|c| matches!(c, Node::Straight { .. })) {
                    return false;
                }
            }
            // a bare straight edge is itself a collapsed straight slot: allowed
        }
        if let Some(count) = self.odd_vertices {
            let odd = t.vertices().iter().filter(|p| p.len() % 2 == 1).count();
            if odd != count {
                return false;
            }
        }
        if self.odd_leafless {
            for p in t.vertices() {
                if p.len() % 2 == 1 {
                    let Some(Node::Vertex { children, .. }) = t.node_at(&p) else { unreachable!() };
                    if children.iter().any(|c| !matches!(c, Node::Vertex { .. })) {
                        return false;
                    }
                }
            }
        }
        if self.external_even {
            for p in t.vertices() {
                let Some(Node::Vertex { children, .. }) = t.node_at(&p) else { unreachable!() };
                let external = children.iter().all(|c| !matches!(c, Node::Vertex { .. }));
                if external && p.len() % 2 == 1 {
                    return false;
                }
            }
        }
        if let Some(lvl) = self.snaky_level {
            for (_, p) in t.snaky_leaves() {
                if p.len() != lvl {
                    return false;
                }
            }
        }
        if let Some(lvl) = self.straight_level {
            for p in t.straight_leaves() {
                if p.len() != lvl {
                    return false;
                }
            }
        }
        if self.no_forbidden && t.detect_forbidden() {
            return false;
        }
        true
    }
}

/// Enumerate canonical isomorphism classes of trees with the given boundary
/// satisfying the constraint, with every vertex arity at most `max_arity`
/// and at most `max_vertices` vertices. Bare edges (single snaky leaf with
/// matching colors, or a single straight leaf for empty boundaries) are
/// included when `include_bare` is set and the constraint admits them.
pub fn enumerate_trees(
    boundary: &Profile,
    colors: &[Color],
    constraint: &TreeConstraint,
    max_arity: usize,
    max_vertices: usize,
    include_bare: bool,
) -> Result<Vec<Tree>, Error> {
    let mut result: Vec<Tree> = vec![];
    if include_bare {
        if boundary.arity() == 1 && boundary.inputs[0] == boundary.output {
            let t = Tree::bare_snaky(boundary.output.clone());
            if constraint.satisfied_by(&t) {
                result.push(t);
            }
        }
        if boundary.arity() == 0 {
            let t = Tree::bare_straight(boundary.output.clone());
            if constraint.satisfied_by(&t) {
                result.push(t);
            }
        }
    }
    // recursive generation of vertex-rooted trees
    let labels: Vec<(usize, Color)> =
        boundary.inputs.iter().cloned().enumerate().map(|(i, c)| (i + 1, c)).collect();
    let mut seen = std::collections::BTreeSet::new();
    let straight_budget = constraint.max_straight.unwrap_or(max_arity * max_vertices);
    let gen = gen_vertex_trees(
        &boundary.output,
        &labels,
        colors,
        max_arity,
        max_vertices,
        straight_budget,
    )?;
    for t in gen {
        let c = t.canonical();
        if constraint.satisfied_by(&c) && seen.insert(c.clone()) {
            result.push(c);
        }
    }
    result.sort_by(|a, b| a.node_count().cmp(&b.node_count()).then(a.cmp(b)));
    Ok(result)
}

/// All vertex-rooted trees with output color `out`, using exactly the snaky
/// labels given, any straight leaves up to the budget, vertex arities `<=
/// max_arity`, at most `max_vertices` vertices.
fn gen_vertex_trees(
    out: &Color,
    labels: &[(usize, Color)],
    colors: &[Color],
    max_arity: usize,
    max_vertices: usize,
    straight_budget: usize,
) -> Result<Vec<Tree>, Error> {
    if max_vertices == 0 {
        return Ok(vec![]);
    }
    // choose: number of children, and for each child whether it is a snaky
    // leaf (consuming a label of that color), a straight leaf (some color),
    // or a subtree (consuming a sub-multiset of labels)
    let mut out_trees = vec![];

    // distribute labels into an ordered list of children; dedupe later
    #[allow(clippy::too_many_arguments)]
    fn rec(
        out: &Color,
        remaining: &[(usize, Color)],
        colors: &[Color],
        max_arity: usize,
        vert_budget: usize,
        straight_budget: usize,
        children: &mut Vec<Node>,
        used_verts: usize,
        acc: &mut Vec<(Vec<Node>, usize)>,
    ) {
        if remaining.is_empty() {
            acc.push((children.clone(), used_verts));
        }
        if children.len() >= max_arity {
            return;
        }
        if !remaining.is_empty() {
            // next child consumes a prefix-nonempty subset of remaining labels;
            // to limit duplication always consume the FIRST remaining label in
            // the subtree or leaf placed now, together with any subset of the rest
            let (first, rest) = remaining.split_first().unwrap();
            let subsets = subsets_of(rest);
            for subset in subsets {
                let mut consumed = vec![first.clone()];
                consumed.extend(subset.iter().cloned());
                let leftover: Vec<(usize, Color)> = rest
                    .iter()
                    .filter(|x| !subset.contains(x))
                    .cloned()
                    .collect();
                if consumed.len() == 1 {
                    // snaky leaf child
                    children.push(Node::Snaky { color: first.1.clone(), label: first.0 });
                    rec(out, &leftover, colors, max_arity, vert_budget, straight_budget, children, used_verts, acc);
                    children.pop();
                }
                // subtree child consuming these labels
                if vert_budget > used_verts {
                    for c in colors {
                        let subs = gen_vertex_trees(
                            c,
                            &consumed,
                            colors,
                            max_arity,
                            vert_budget - used_verts,
                            straight_budget,
                        )
                        .unwrap_or_default();
                        for sub in subs {
                            let sv = sub.vertex_count();
                            if used_verts + sv <= vert_budget {
                                children.push(sub.root.clone());
                                rec(
                                    out,
                                    &leftover,
                                    colors,
                                    max_arity,
                                    vert_budget,
                                    straight_budget,
                                    children,
                                    used_verts + sv,
                                    acc,
                                );
                                children.pop();
                            }
                        }
                    }
                }
            }
        } else {
            // only straight-leaf or label-free subtree children may be added
            let straight_so_far = count_straight(children);
            if straight_so_far < straight_budget {
                for c in colors {
                    children.push(Node::Straight { color: c.clone() });
                    rec(out, remaining, colors, max_arity, vert_budget, straight_budget, children, used_verts, acc);
                    children.pop();
                }
            }
            if vert_budget > used_verts {
                for c in colors {
                    let subs = gen_vertex_trees(
                        c,
                        &[],
                        colors,
                        max_arity,
                        vert_budget - used_verts,
                        straight_budget.saturating_sub(straight_so_far),
                    )
                    .unwrap_or_default();
                    for sub in subs {
                        let sv = sub.vertex_count();
                        if used_verts + sv <= vert_budget {
                            children.push(sub.root.clone());
                            rec(
                                out,
                                remaining,
                                colors,
                                max_arity,
                                vert_budget,
                                straight_budget,
                                children,
                                used_verts + sv,
                                acc,
                            );
                            children.pop();
                        }
                    }
                }
            }
        }
    }

    fn count_straight(children: &[Node]) -> usize {
        let mut n = 0;
        for c in children {
            match c {
                Node::Straight { .. } => n += 1,
                Node::Vertex { children, .. } => n += count_straight(children),
                _ => {}
            }
        }
        n
    }

    let mut acc: Vec<(Vec<Node>, usize)> = vec![];
    let mut children = vec![];
    rec(
        out,
        labels,
        colors,
        max_arity,
        max_vertices - 1,
        straight_budget,
        &mut children,
        0,
        &mut acc,
    );
    let mut seen = std::collections::BTreeSet::new();
    for (children, _) in acc {
        if children.len() > max_arity {
            continue;
        }
        let t = Tree::new(Node::Vertex { color: out.clone(), children }).canonical();
        if seen.insert(t.clone()) {
            out_trees.push(t);
        }
    }

    Ok(out_trees)
}

fn subsets_of<T: Clone>(xs: &[T]) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    for x in xs {
        let mut more = vec![];
        for s in &out {
            let mut s2 = s.clone();
            s2.push(x.clone());
            more.push(s2);
        }
        out.extend(more);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Color {
        s.to_string()
    }

    #[test]
    fn corolla_canonical_and_boundary() {
        let p = Profile::new(vec![c("a"), c("b")], "d");
        let t = Tree::corolla(&p, &[c("b")]);
        assert!(t.is_canonical());
        assert_eq!(t.boundary(), p);
        assert_eq!(t.straight_leaves().len(), 1);
    }

    #[test]
    fn nonplanarity_same_canonical_form() {
        let t1 = Tree::parse("d(a~1,b~2)").unwrap().canonical();
        let t2 = Tree::parse("d(b~2,a~1)").unwrap().canonical();
        assert_eq!(t1, t2);
    }

    #[test]
    fn snaky_labels_distinguish() {
        let t1 = Tree::parse("d(a~1,a~2)").unwrap().canonical();
        let t2 = Tree::parse("d(a~2,a~1)").unwrap().canonical();
        assert_eq!(t1, t2); // same class: swapping relabels nothing structural
        let u1 = Tree::parse("d(d(a~1,b~2),c!)").unwrap().canonical();
        let u2 = Tree::parse("d(d(a~2,b~1),c!)").unwrap().canonical();
        assert_ne!(u1, u2);
    }

    #[test]
    fn canonicalize_idempotent() {
        let t = Tree::parse("d(d(a~2,b~1),d(c!,c!),c!)").unwrap().canonical();
        assert_eq!(t, t.canonical());
    }

    #[test]
    fn aut_of_labeled_corolla_is_trivial() {
        let p = Profile::new(vec![c("a"), c("a")], "d");
        let t = Tree::corolla(&p, &[]);
        assert_eq!(t.automorphisms(true).order(), 1);
        assert_eq!(t.automorphisms(false).order(), 2);
    }

    #[test]
    fn aut_of_straight_corolla_is_symmetric() {
        let p = Profile::constant("d");
        let t = Tree::corolla(&p, &[c("a"), c("a"), c("a")]);
        assert_eq!(t.automorphisms(true).order(), 6);
        let mixed = Tree::corolla(&p, &[c("a"), c("a"), c("b")]);
        assert_eq!(mixed.automorphisms(true).order(), 2);
    }

    #[test]
    fn aut_of_two_identical_grafted_corollas() {
        // root with two identical straight-leaf corollas: swap x inner auts
        let t = Tree::parse("d(d(a!,a!),d(a!,a!))").unwrap().canonical();
        // each subtree has Σ2 on its straight leaves, plus the swap: 2*2*2
        assert_eq!(t.automorphisms(true).order(), 8);
    }

    #[test]
    fn graft_and_contract_roundtrip_counts() {
        let base = Tree::parse("d(a~1,c!)").unwrap().canonical();
        let slot = base.straight_leaves()[0].clone();
        let graft = Tree::parse("c(b!,b!)").unwrap();
        let mut asg = BTreeMap::new();
        asg.insert(slot.clone(), graft.clone());
        let g = base.graft(&asg).unwrap();
        assert_eq!(g.vertex_count(), 2);
        let contracted = g.contract_edge(&slot).unwrap();
        assert_eq!(contracted.vertex_count(), 1);
        assert_eq!(contracted.straight_leaves().len(), 2);
    }

    #[test]
    fn contract_unique_inner_edge_of_two_vertex_tree() {
        let t = Tree::parse("d(c(a~1))").unwrap();
        let contracted = t.contract_edge(&[0]).unwrap();
        assert_eq!(contracted, Tree::parse("d(a~1)").unwrap());
    }

    #[test]
    fn forbidden_shapes() {
        // corolla: no odd vertices
        assert!(!Tree::parse("d(a~1,b!)").unwrap().detect_forbidden());
        // odd vertex with an all-straight-leaf vertex child (shape A)
        assert!(Tree::parse("d(d(d(b!,b!)))").unwrap().detect_forbidden());
        // odd leafless vertex whose parent has only straight siblings (shape B)
        assert!(Tree::parse("d(d(d(a~1)),b!)").unwrap().detect_forbidden());
        // odd vertex with a snaky leaf above: fine
        assert!(!Tree::parse("d(d(d(a~1,b!),b~2))").unwrap().detect_forbidden());
    }

    #[test]
    fn parse_print_roundtrip() {
        let s = "d(a~1,b!,e(a~2))";
        let t = Tree::parse(s).unwrap();
        assert_eq!(t.notation(), s);
    }

    #[test]
    fn enumerate_corolla_only_at_height_zero() {
        let p = Profile::new(vec![c("a"), c("b")], "d");
        let constraint = TreeConstraint { max_height: Some(0), ..Default::default() };
        let ts = enumerate_trees(&p, &[c("a"), c("b"), c("d")], &constraint, 3, 2, false).unwrap();
        // corollas with 0 or 1 straight leaves of each color
        assert!(ts.iter().all(|t| t.vertex_count() == 1));
        assert!(ts.contains(&Tree::corolla(&p, &[])));
    }

    #[test]
    fn enumerate_excludes_straight_corolla() {
        let p = Profile::constant("d");
        let constraint = TreeConstraint {
            no_straight_corollas: true,
            max_vertices: Some(1),
            ..Default::default()
        };
        let ts = enumerate_trees(&p, &[c("d")], &constraint, 2, 1, false).unwrap();
        assert!(ts.is_empty());
    }

    #[test]
    fn enumeration_stable_under_color_renaming() {
        let p1 = Profile::new(vec![c("a"), c("a")], "a");
        let p2 = Profile::new(vec![c("z"), c("z")], "z");
        let cons = TreeConstraint { max_vertices: Some(2), ..Default::default() };
        let t1 = enumerate_trees(&p1, &[c("a")], &cons, 3, 2, true).unwrap();
        let t2 = enumerate_trees(&p2, &[c("z")], &cons, 3, 2, true).unwrap();
        assert_eq!(t1.len(), t2.len());
    }
}
