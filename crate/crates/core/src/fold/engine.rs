//! The resolution search. One engine serves both folding algorithms and the
//! completeness test:
//!
//! * Horn mode is a linear derivation: supported goal clauses resolve
//!   against input clauses only.
//! * Disjunctive mode is set-of-support saturation: supported clauses also
//!   resolve with each other, in both polarities.
//! * The completeness test additionally resolves a clause with its own
//!   ancestors and stops at the empty clause.
//!
//! Nodes are explored in order of resolution depth (factoring and built-in
//! simplification are free), so the first derivation found is a minimal one.
//! Variants of already-seen clauses are pruned, which also implements the
//! bounded-recursion repetition check.

use super::derivation::{ans_args, is_ans, Dir, Partner, Step};
use crate::kernel::{
    builtin_implies, eval_ground, rename_apart, resolve, unify_atoms, Clause, FreshCounter,
    Subst, Term,
};
use std::collections::{BTreeSet, BinaryHeap, HashMap};

#[derive(Clone, Debug)]
pub struct InputClause {
    pub label: String,
    pub clause: Clause,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Horn,
    Disjunctive,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub mode: Mode,
    /// Applied when the constraint regime requires a depth bound.
    pub depth_bound: Option<usize>,
    /// Resolve clauses against their own ancestors (completeness test).
    pub ancestry: bool,
    /// Stop as soon as the empty clause is derived (completeness test).
    pub stop_at_empty: bool,
    /// Discard derivations whose answer tuple loses a variable to a
    /// constant or Skolem term (folding mode).
    pub require_var_answers: bool,
    /// Resolve supported clauses with each other. The folding search needs
    /// this to merge branches; the completeness test relies on ancestry
    /// instead.
    pub supported_pairs: bool,
    /// Safety net on queue pops for searches with no natural bound.
    pub step_budget: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Horn,
            depth_bound: None,
            ancestry: false,
            stop_at_empty: false,
            require_var_answers: true,
            supported_pairs: true,
            step_budget: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub clause: Clause,
    pub parent: Option<usize>,
    pub step: Step,
    pub res_depth: usize,
    /// Indices of the query disjuncts this node descends from.
    pub roots: BTreeSet<usize>,
    pub processed: bool,
    /// Renaming-invariant structural fingerprint, used to skip expensive
    /// variant checks.
    pub fingerprint: u64,
    /// The node that was expanded to produce this one (skipping
    /// simplification links); factoring freshness is judged against it.
    pub expansion_parent: Option<usize>,
}

pub struct Engine {
    pub inputs: Vec<InputClause>,
    pub nodes: Vec<Node>,
    pub config: EngineConfig,
    queue: BinaryHeap<std::cmp::Reverse<(usize, usize, usize)>>,
    memo: HashMap<u64, Vec<(usize, usize)>>,
    processed: Vec<usize>,
    /// Input ids indexed by the predicate of each head atom.
    inputs_by_head: HashMap<String, Vec<usize>>,
    /// Input ids indexed by the predicate of each positive body literal.
    inputs_by_body: HashMap<String, Vec<usize>>,
    /// Whether any input clause has an equality head (a functional
    /// dependency or the transitivity axiom).
    has_eq_inputs: bool,
    ctr: FreshCounter,
    pub hit_depth_bound: bool,
    pub hit_budget: bool,
    pub empty_clause: Option<usize>,
    pub stat_admits: usize,
    pub stat_memo_hits: usize,
}

impl Engine {
    pub fn new(inputs: Vec<InputClause>, config: EngineConfig) -> Engine {
        let ctr = FreshCounter::above(
            inputs
                .iter()
                .flat_map(|i| i.clause.vars().into_iter()),
        );
        let has_eq_inputs = inputs.iter().any(|i| {
            i.clause
                .head
                .iter()
                .any(|a| a.builtin_op() == Some(crate::kernel::CmpOp::Eq))
        });
        let mut inputs_by_head: HashMap<String, Vec<usize>> = HashMap::new();
        let mut inputs_by_body: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, input) in inputs.iter().enumerate() {
            for h in &input.clause.head {
                let key = h.pred.name();
                let entry = inputs_by_head.entry(key).or_default();
                if entry.last() != Some(&i) {
                    entry.push(i);
                }
            }
            for l in &input.clause.body {
                if !l.positive {
                    continue;
                }
                let key = l.atom.pred.name();
                let entry = inputs_by_body.entry(key).or_default();
                if entry.last() != Some(&i) {
                    entry.push(i);
                }
            }
        }
        Engine {
            inputs,
            nodes: Vec::new(),
            config,
            queue: BinaryHeap::new(),
            memo: HashMap::new(),
            processed: Vec::new(),
            inputs_by_head,
            inputs_by_body,
            has_eq_inputs,
            ctr,
            hit_depth_bound: false,
            hit_budget: false,
            empty_clause: None,
            stat_admits: 0,
            stat_memo_hits: 0,
        }
    }

    pub fn add_top(&mut self, clause: Clause, disjunct: usize) {
        let roots: BTreeSet<usize> = [disjunct].into_iter().collect();
        self.admit(clause, None, Step::Top { disjunct }, 0, roots);
    }

    pub fn run(&mut self) {
        let mut pops = 0usize;
        while let Some(std::cmp::Reverse((_, _, id))) = self.queue.pop() {
            if self.empty_clause.is_some() {
                return;
            }
            pops += 1;
            if pops > self.config.step_budget {
                self.hit_budget = true;
                return;
            }
            self.expand(id);
            self.nodes[id].processed = true;
            self.processed.push(id);
        }
    }

    fn expand(&mut self, id: usize) {
        // Factoring first: merged clauses are smaller and cost no depth.
        // Only pairs touching a literal that changed in this expansion are
        // considered; any other pair was already available one step up and
        // commutes with the step taken.
        let clause = self.nodes[id].clause.clone();
        let parent_clause = self.nodes[id]
            .expansion_parent
            .map(|p| self.nodes[p].clause.clone());
        let stale_atom = |a: &crate::kernel::Atom| -> bool {
            parent_clause
                .as_ref()
                .map(|p| p.head.contains(a))
                .unwrap_or(false)
        };
        let stale_lit = |l: &crate::kernel::Literal| -> bool {
            parent_clause
                .as_ref()
                .map(|p| p.body.contains(l))
                .unwrap_or(false)
        };
        for (in_head, keep, merged, mgu) in factor_pairs(&clause) {
            let both_stale = if in_head {
                stale_atom(&clause.head[keep]) && stale_atom(&clause.head[merged])
            } else {
                stale_lit(&clause.body[keep]) && stale_lit(&clause.body[merged])
            };
            if both_stale {
                continue;
            }
            let child = apply_factor(&clause, in_head, keep, merged, &mgu);
            self.admit(
                child,
                Some(id),
                Step::Factor {
                    in_head,
                    keep,
                    merged,
                    mgu,
                },
                self.nodes[id].res_depth,
                self.nodes[id].roots.clone(),
            );
        }
        // Resolution against inputs that share a predicate, in input order.
        let mut relevant: BTreeSet<usize> = BTreeSet::new();
        for l in &clause.body {
            if l.positive {
                if let Some(ids) = self.inputs_by_head.get(&l.atom.pred.name()) {
                    relevant.extend(ids.iter().copied());
                }
            }
        }
        if self.config.mode == Mode::Disjunctive {
            for h in &clause.head {
                if !is_ans(h) {
                    if let Some(ids) = self.inputs_by_body.get(&h.pred.name()) {
                        relevant.extend(ids.iter().copied());
                    }
                }
            }
        }
        for input_id in relevant {
            let partner = self.inputs[input_id].clause.clone();
            self.resolve_against(id, partner, Partner::Input(input_id));
        }
        // Set-of-support: resolution among supported clauses.
        if self.config.mode == Mode::Disjunctive && self.config.supported_pairs {
            let partners: Vec<usize> = self
                .processed
                .iter()
                .copied()
                .chain(std::iter::once(id))
                .collect();
            for other in partners {
                if !may_interact(&clause, &self.nodes[other].clause) {
                    continue;
                }
                let partner = self.nodes[other].clause.clone();
                self.resolve_against(id, partner, Partner::Supported(other));
            }
        }
        if self.config.ancestry {
            let mut chain = Vec::new();
            let mut at = self.nodes[id].parent;
            while let Some(p) = at {
                chain.push(p);
                at = self.nodes[p].parent;
            }
            for anc in chain {
                let partner = self.nodes[anc].clause.clone();
                self.resolve_against(id, partner, Partner::Ancestor(anc));
            }
        }
    }

    fn resolve_against(&mut self, id: usize, partner: Clause, source: Partner) {
        let clause = self.nodes[id].clause.clone();
        // While a variable-to-variable equality is open and equality heads
        // exist, the search works on the equality chain first: resolutions
        // on other literals commute past the chain steps and only multiply
        // the tree.
        let eq_chain_open = self.has_eq_inputs
            && clause.body.iter().any(|l| {
                l.positive
                    && l.atom.builtin_op() == Some(crate::kernel::CmpOp::Eq)
                    && l.atom.args.iter().all(|t| t.is_var())
            });
        let depth = self.nodes[id].res_depth + 1;
        if let Some(bound) = self.config.depth_bound {
            if depth > bound {
                self.hit_depth_bound = true;
                return;
            }
        }
        let renamed = rename_apart(&partner, &mut self.ctr);
        let mut roots = self.nodes[id].roots.clone();
        match &source {
            Partner::Supported(other) | Partner::Ancestor(other) => {
                roots.extend(self.nodes[*other].roots.iter().copied());
            }
            Partner::Input(_) => {}
        }
        // This clause's positive body literals against partner heads.
        let partner_is_axiom = renamed.origin == crate::kernel::Origin::Axiom;
        for (bi, lit) in clause.body.iter().enumerate() {
            if !lit.positive {
                continue;
            }
            // The transitivity axiom splits an equality into a chain; only
            // variable-to-variable equalities can profit, anything else
            // resolves directly with a constraint head.
            if partner_is_axiom && !lit.atom.args.iter().all(|t| t.is_var()) {
                continue;
            }
            if eq_chain_open
                && !(lit.atom.builtin_op() == Some(crate::kernel::CmpOp::Eq)
                    && lit.atom.args.iter().all(|t| t.is_var()))
            {
                continue;
            }
            for (hi, head) in renamed.head.iter().enumerate() {
                if is_ans(head) {
                    continue;
                }
                if let Some((child, mgu)) = resolve(&clause, bi, &renamed, hi) {
                    self.admit(
                        child,
                        Some(id),
                        Step::Resolve {
                            partner: source.clone(),
                            dir: Dir::BodyVsHead,
                            this_idx: bi,
                            partner_idx: hi,
                            renamed: renamed.clone(),
                            mgu,
                        },
                        depth,
                        roots.clone(),
                    );
                }
            }
        }
        // This clause's head atoms against the partner's positive body
        // literals. Linear (Horn-mode) derivations never need this: goal
        // clauses have no ordinary head atoms.
        if self.config.mode == Mode::Disjunctive {
            for (hi, head) in clause.head.iter().enumerate() {
                if is_ans(head) {
                    continue;
                }
                for (bi, lit) in renamed.body.iter().enumerate() {
                    if !lit.positive {
                        continue;
                    }
                    if let Some((child, mgu)) = resolve(&renamed, bi, &clause, hi) {
                        self.admit(
                            child,
                            Some(id),
                            Step::Resolve {
                                partner: source.clone(),
                                dir: Dir::HeadVsBody,
                                this_idx: hi,
                                partner_idx: bi,
                                renamed: renamed.clone(),
                                mgu,
                            },
                            depth,
                            roots.clone(),
                        );
                    }
                }
            }
        }
    }

    /// Simplifies, prunes, and enqueues a candidate clause. Intermediate
    /// simplification steps become nodes of their own so proofs replay.
    fn admit(
        &mut self,
        clause: Clause,
        parent: Option<usize>,
        step: Step,
        depth: usize,
        roots: BTreeSet<usize>,
    ) {
        self.stat_admits += 1;
        // The chain of (clause, step) pairs to materialize if the final
        // clause survives pruning.
        let mut chain: Vec<(Clause, Step)> = vec![(clause, step)];
        let current = |chain: &Vec<(Clause, Step)>| chain.last().unwrap().0.clone();
        // Mandatory merge of answer atoms from two supported parents.
        loop {
            let c = current(&chain);
            let ans_positions: Vec<usize> = c
                .head
                .iter()
                .enumerate()
                .filter(|(_, a)| is_ans(a))
                .map(|(i, _)| i)
                .collect();
            if ans_positions.len() < 2 {
                break;
            }
            let (keep, merged) = (ans_positions[0], ans_positions[1]);
            let mgu = match unify_atoms(&c.head[keep], &c.head[merged]) {
                Some(m) => m,
                None => return,
            };
            let next = apply_factor(&c, true, keep, merged, &mgu);
            chain.push((
                next,
                Step::Factor {
                    in_head: true,
                    keep,
                    merged,
                    mgu,
                },
            ));
        }
        // Built-in evaluation and duplicate removal to a fixpoint.
        loop {
            let c = current(&chain);
            if let Some((i, value)) = first_ground_builtin(&c) {
                if !value {
                    return;
                }
                let mut next = c.clone();
                next.body.remove(i);
                chain.push((next, Step::BuiltinTrue { removed: i }));
                continue;
            }
            if let Some((in_head, i)) = first_exact_duplicate(&c) {
                let mut next = c.clone();
                if in_head {
                    next.head.remove(i);
                } else {
                    next.body.remove(i);
                }
                chain.push((next, Step::RemoveDuplicate { in_head, removed: i }));
                continue;
            }
            if let Some((removed, implied_by)) = first_subsumed_builtin(&c) {
                let mut next = c.clone();
                next.body.remove(removed);
                chain.push((
                    next,
                    Step::BuiltinSubsume {
                        removed,
                        implied_by,
                    },
                ));
                continue;
            }
            break;
        }
        let final_clause = current(&chain);
        // Tautologies contribute nothing.
        if final_clause.head.iter().any(|a| {
            !is_ans(a) && final_clause.body.iter().any(|l| l.positive && l.atom == *a)
        }) {
            return;
        }
        // An answer entry instantiated to a constant or Skolem term can
        // never recover; the leaf condition requires the query variables.
        if self.config.require_var_answers {
            if let Some(args) = ans_args(&final_clause) {
                if args.iter().any(|t| !t.is_var()) {
                    return;
                }
                let mut seen = BTreeSet::new();
                for t in args {
                    if let Term::Var(v) = t {
                        if !seen.insert(v.clone()) {
                            return;
                        }
                    }
                }
            }
        }
        // Repetition check: a variant of an ancestor clause cannot lead
        // anywhere new.
        let fingerprint = fingerprint_of(&final_clause);
        let mut at = parent;
        while let Some(p) = at {
            if self.nodes[p].fingerprint == fingerprint
                && crate::kernel::variant_eq(&self.nodes[p].clause, &final_clause)
            {
                return;
            }
            at = self.nodes[p].parent;
        }
        // Global variant table: re-expand only if reached strictly shallower.
        if let Some(entries) = self.memo.get(&fingerprint) {
            for (other, seen_depth) in entries {
                if *seen_depth <= depth
                    && crate::kernel::variant_eq(&self.nodes[*other].clause, &final_clause)
                {
                    self.stat_memo_hits += 1;
                    return;
                }
            }
        }
        // Materialize the chain.
        let mut parent_id = parent;
        let mut final_id = 0;
        for (clause, s) in chain {
            let fp = fingerprint_of(&clause);
            self.nodes.push(Node {
                clause,
                parent: parent_id,
                step: s,
                res_depth: depth,
                roots: roots.clone(),
                processed: false,
                fingerprint: fp,
                expansion_parent: parent,
            });
            final_id = self.nodes.len() - 1;
            parent_id = Some(final_id);
        }
        if final_clause.is_empty() {
            self.empty_clause = Some(final_id);
        }
        self.memo
            .entry(fingerprint)
            .or_default()
            .push((final_id, depth));
        let seq = self.nodes.len();
        self.queue.push(std::cmp::Reverse((depth, seq, final_id)));
    }
}

fn apply_factor(c: &Clause, in_head: bool, _keep: usize, merged: usize, mgu: &Subst) -> Clause {
    let mut out = c.clone();
    if in_head {
        out.head.remove(merged);
    } else {
        out.body.remove(merged);
    }
    mgu.apply_clause(&out)
}

fn factor_pairs(c: &Clause) -> Vec<(bool, usize, usize, Subst)> {
    let mut out = Vec::new();
    for i in 0..c.head.len() {
        if is_ans(&c.head[i]) {
            continue;
        }
        for j in (i + 1)..c.head.len() {
            if is_ans(&c.head[j]) || c.head[i] == c.head[j] {
                continue;
            }
            if let Some(mgu) = unify_atoms(&c.head[i], &c.head[j]) {
                out.push((true, i, j, mgu));
            }
        }
    }
    for i in 0..c.body.len() {
        if c.body[i].atom.is_builtin() {
            continue;
        }
        for j in (i + 1)..c.body.len() {
            if c.body[i].positive != c.body[j].positive || c.body[i] == c.body[j] {
                continue;
            }
            if let Some(mgu) = unify_atoms(&c.body[i].atom, &c.body[j].atom) {
                out.push((false, i, j, mgu));
            }
        }
    }
    out
}

fn first_ground_builtin(c: &Clause) -> Option<(usize, bool)> {
    for (i, l) in c.body.iter().enumerate() {
        if let Some(op) = l.atom.builtin_op() {
            if let Some(v) = eval_ground(op, &l.atom.args[0], &l.atom.args[1]) {
                return Some((i, v == l.positive));
            }
        }
    }
    None
}

fn first_exact_duplicate(c: &Clause) -> Option<(bool, usize)> {
    for i in 0..c.head.len() {
        for j in (i + 1)..c.head.len() {
            if c.head[i] == c.head[j] {
                return Some((true, j));
            }
        }
    }
    for i in 0..c.body.len() {
        for j in (i + 1)..c.body.len() {
            if c.body[i] == c.body[j] {
                return Some((false, j));
            }
        }
    }
    None
}

fn first_subsumed_builtin(c: &Clause) -> Option<(usize, usize)> {
    for i in 0..c.body.len() {
        if !c.body[i].positive || !c.body[i].atom.is_builtin() {
            continue;
        }
        for j in 0..c.body.len() {
            if i == j || !c.body[j].positive || !c.body[j].atom.is_builtin() {
                continue;
            }
            if c.body[j].atom != c.body[i].atom
                && builtin_implies(&c.body[j].atom, &c.body[i].atom)
            {
                return Some((i, j));
            }
        }
    }
    None
}

/// A renaming-invariant fingerprint: the multiset of literal skeleton
/// hashes, the variable count, and the multiset of variable occurrence
/// degrees. Variant clauses always agree on it; collisions fall back to the
/// exact check.
pub fn fingerprint_of(c: &Clause) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut skeletons: Vec<u64> = c
        .head
        .iter()
        .map(|a| skeleton_hash(a, 1))
        .chain(c.body.iter().map(|l| skeleton_hash(&l.atom, if l.positive { 2 } else { 3 })))
        .collect();
    skeletons.sort_unstable();
    let mut degrees: HashMap<&str, usize> = HashMap::new();
    for a in c.head.iter().chain(c.body.iter().map(|l| &l.atom)) {
        for t in &a.args {
            count_var_occurrences(t, &mut degrees);
        }
    }
    let mut degree_multiset: Vec<usize> = degrees.values().copied().collect();
    degree_multiset.sort_unstable();
    let mut h = std::collections::hash_map::DefaultHasher::new();
    skeletons.hash(&mut h);
    degree_multiset.hash(&mut h);
    degrees.len().hash(&mut h);
    h.finish()
}

fn count_var_occurrences<'a>(t: &'a Term, out: &mut HashMap<&'a str, usize>) {
    match t {
        Term::Var(v) => *out.entry(v.as_str()).or_default() += 1,
        Term::Cst(_) => {}
        Term::Sk(_, args) => args.iter().for_each(|a| count_var_occurrences(a, out)),
    }
}

fn skeleton_hash(a: &crate::kernel::Atom, tag: u8) -> u64 {
    use std::hash::{Hash, Hasher};
    fn term(t: &Term, h: &mut std::collections::hash_map::DefaultHasher) {
        match t {
            Term::Var(_) => 0u8.hash(h),
            Term::Cst(c) => {
                1u8.hash(h);
                c.hash(h);
            }
            Term::Sk(f, args) => {
                2u8.hash(h);
                f.hash(h);
                for a in args {
                    term(a, h);
                }
            }
        }
    }
    let mut h = std::collections::hash_map::DefaultHasher::new();
    tag.hash(&mut h);
    a.pred.hash(&mut h);
    a.args.len().hash(&mut h);
    for t in &a.args {
        term(t, &mut h);
    }
    h.finish()
}

/// Quick test for whether two clauses can resolve at all: some head
/// predicate of one occurs as a positive body literal of the other.
fn may_interact(a: &Clause, b: &Clause) -> bool {
    let heads = |c: &Clause| -> BTreeSet<String> {
        c.head
            .iter()
            .filter(|at| !is_ans(at))
            .map(|at| at.pred.name())
            .collect()
    };
    let bodies = |c: &Clause| -> BTreeSet<String> {
        c.body
            .iter()
            .filter(|l| l.positive)
            .map(|l| l.atom.pred.name())
            .collect()
    };
    heads(a).intersection(&bodies(b)).next().is_some()
        || heads(b).intersection(&bodies(a)).next().is_some()
}

/// Does any resolution step apply to this clause? Used to mark terminal
/// leaves; partners are the inputs plus, in disjunctive mode, the supported
/// set.
pub fn has_applicable_step(
    clause: &Clause,
    inputs: &[InputClause],
    supported: &[&Clause],
    mode: Mode,
    ignore_builtin_literals: bool,
) -> bool {
    let mut ctr = FreshCounter::above(clause.vars().into_iter());
    let partners: Vec<&Clause> = inputs
        .iter()
        .map(|i| &i.clause)
        .chain(supported.iter().copied())
        .collect();
    let n_inputs = inputs.len();
    for (pi, partner) in partners.iter().enumerate() {
        let renamed = rename_apart(partner, &mut ctr);
        for (bi, lit) in clause.body.iter().enumerate() {
            if !lit.positive || (ignore_builtin_literals && lit.atom.is_builtin()) {
                continue;
            }
            for hi in 0..renamed.head.len() {
                if is_ans(&renamed.head[hi]) {
                    continue;
                }
                if resolve(clause, bi, &renamed, hi).is_some() {
                    return true;
                }
            }
        }
        let allow_head_side = mode == Mode::Disjunctive || pi >= n_inputs;
        if allow_head_side {
            for (hi, head) in clause.head.iter().enumerate() {
                if is_ans(head) {
                    continue;
                }
                for (bi, lit) in renamed.body.iter().enumerate() {
                    if !lit.positive {
                        continue;
                    }
                    if resolve(&renamed, bi, clause, hi).is_some() {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// True when an integrity constraint subsumes the goal, refuting it: the
/// goal can have no answers along that disjunct.
pub fn refuted_by_constraint(goal: &Clause, ics: &[Clause]) -> bool {
    let visible = super::derivation::strip_ans(goal);
    ics.iter().any(|ic| crate::kernel::subsumes(ic, &visible))
}
