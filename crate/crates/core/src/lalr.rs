//! LALR(1) table construction.
//!
//! LR(0) item sets are built first; lookaheads are then computed with the
//! spontaneous-generation / propagation scheme, using a dummy lookahead to
//! detect propagation. Shift/reduce conflicts resolve to shift and
//! reduce/reduce conflicts to the earlier rule; every resolution is recorded.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    T(u16),
    N(u16),
}

#[derive(Debug, Clone)]
pub struct Production {
    pub lhs: u16,
    pub rhs: Vec<Sym>,
}

/// Grammar in symbol-id form. Rule 0 must be the augmented start rule(s)
/// of nonterminal `start`; reducing any rule of `start` is an accept.
#[derive(Debug, Clone)]
pub struct SymGrammar {
    pub n_terminals: usize,
    pub n_nonterminals: usize,
    pub rules: Vec<Production>,
    pub start: u16,
    /// Terminal id of end-of-input.
    pub eof: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Error,
    Shift(u32),
    Reduce(u32),
    Accept,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conflict {
    ShiftReduce { state: u32, terminal: u16, rule: u32 },
    ReduceReduce { state: u32, terminal: u16, kept: u32, dropped: u32 },
}

#[derive(Debug, Clone)]
pub struct Tables {
    pub n_states: usize,
    pub n_terminals: usize,
    pub n_nonterminals: usize,
    action: Vec<Action>,
    goto: Vec<u32>,
    /// Rule to reduce without consulting the lookahead, for states whose
    /// only possible action is that reduction.
    pub default_reduce: Vec<Option<u32>>,
    pub conflicts: Vec<Conflict>,
}

pub const NO_STATE: u32 = u32::MAX;

impl Tables {
    #[inline]
    pub fn action(&self, state: u32, term: u16) -> Action {
        self.action[state as usize * self.n_terminals + term as usize]
    }

    #[inline]
    pub fn goto(&self, state: u32, nt: u16) -> Option<u32> {
        let g = self.goto[state as usize * self.n_nonterminals + nt as usize];
        (g != NO_STATE).then_some(g)
    }

    /// Terminals with a non-error action in `state`.
    pub fn expected(&self, state: u32) -> Vec<u16> {
        (0..self.n_terminals as u16)
            .filter(|&t| self.action(state, t) != Action::Error)
            .collect()
    }
}

const WORDS: usize = 4;

#[derive(Clone, Copy, PartialEq, Eq, Default, Hash)]
struct TermSet([u64; WORDS]);

impl TermSet {
    fn insert(&mut self, t: usize) -> bool {
        let (w, b) = (t / 64, t % 64);
        let had = self.0[w] & (1 << b) != 0;
        self.0[w] |= 1 << b;
        !had
    }

    fn contains(&self, t: usize) -> bool {
        self.0[t / 64] & (1 << (t % 64)) != 0
    }

    fn union(&mut self, o: &TermSet) -> bool {
        let mut changed = false;
        for i in 0..WORDS {
            let n = self.0[i] | o.0[i];
            changed |= n != self.0[i];
            self.0[i] = n;
        }
        changed
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..WORDS * 64).filter(move |&t| self.contains(t))
    }
}

type Item = (u32, u32);

struct Builder<'g> {
    g: &'g SymGrammar,
    rules_of: Vec<Vec<u32>>,
    nullable: Vec<bool>,
    first: Vec<TermSet>,
    /// Dummy lookahead used to detect propagation.
    hash: usize,
}

impl<'g> Builder<'g> {
    fn new(g: &'g SymGrammar) -> Builder<'g> {
        assert!(g.n_terminals < WORDS * 64 - 1, "too many terminals");
        let mut rules_of = vec![Vec::new(); g.n_nonterminals];
        for (i, r) in g.rules.iter().enumerate() {
            rules_of[r.lhs as usize].push(i as u32);
        }
        let mut b = Builder {
            g,
            rules_of,
            nullable: vec![false; g.n_nonterminals],
            first: vec![TermSet::default(); g.n_nonterminals],
            hash: g.n_terminals,
        };
        b.compute_first();
        b
    }

    fn compute_first(&mut self) {
        let mut changed = true;
        while changed {
            changed = false;
            for r in &self.g.rules {
                let lhs = r.lhs as usize;
                let mut all_nullable = true;
                for s in &r.rhs {
                    match *s {
                        Sym::T(t) => {
                            changed |= self.first[lhs].insert(t as usize);
                            all_nullable = false;
                        }
                        Sym::N(n) => {
                            let f = self.first[n as usize];
                            changed |= self.first[lhs].union(&f);
                            if !self.nullable[n as usize] {
                                all_nullable = false;
                            }
                        }
                    }
                    if !all_nullable {
                        break;
                    }
                }
                if all_nullable && !self.nullable[lhs] {
                    self.nullable[lhs] = true;
                    changed = true;
                }
            }
        }
    }

    /// FIRST of a symbol string followed by lookahead set `la`.
    fn first_of(&self, syms: &[Sym], la: &TermSet) -> TermSet {
        let mut out = TermSet::default();
        for s in syms {
            match *s {
                Sym::T(t) => {
                    out.insert(t as usize);
                    return out;
                }
                Sym::N(n) => {
                    out.union(&self.first[n as usize]);
                    if !self.nullable[n as usize] {
                        return out;
                    }
                }
            }
        }
        out.union(la);
        out
    }

    fn next_sym(&self, (r, d): Item) -> Option<Sym> {
        self.g.rules[r as usize].rhs.get(d as usize).copied()
    }

    fn lr0_closure(&self, kernel: &[Item]) -> Vec<Item> {
        let mut items: Vec<Item> = kernel.to_vec();
        let mut seen = vec![false; self.g.n_nonterminals];
        let mut i = 0;
        while i < items.len() {
            if let Some(Sym::N(n)) = self.next_sym(items[i]) {
                if !seen[n as usize] {
                    seen[n as usize] = true;
                    for &r in &self.rules_of[n as usize] {
                        items.push((r, 0));
                    }
                }
            }
            i += 1;
        }
        items
    }

    /// LR(1) closure with lookahead sets.
    fn lr1_closure(&self, kernel: &[(Item, TermSet)]) -> Vec<(Item, TermSet)> {
        let mut items: Vec<(Item, TermSet)> = kernel.to_vec();
        let mut index: HashMap<Item, usize> =
            items.iter().enumerate().map(|(i, (it, _))| (*it, i)).collect();
        let mut work: Vec<usize> = (0..items.len()).collect();
        while let Some(i) = work.pop() {
            let ((r, d), la) = items[i];
            let rhs = &self.g.rules[r as usize].rhs;
            let Some(Sym::N(n)) = rhs.get(d as usize).copied() else {
                continue;
            };
            let f = self.first_of(&rhs[d as usize + 1..], &la);
            for &pr in &self.rules_of[n as usize] {
                let it = (pr, 0);
                match index.get(&it) {
                    Some(&j) => {
                        if items[j].1.union(&f) {
                            work.push(j);
                        }
                    }
                    None => {
                        index.insert(it, items.len());
                        items.push((it, f));
                        work.push(items.len() - 1);
                    }
                }
            }
        }
        items
    }

    fn build(self) -> Tables {
        let g = self.g;
        let nt = g.n_terminals;
        let nn = g.n_nonterminals;
        // LR(0) collection.
        let start_kernel: Vec<Item> = self.rules_of[g.start as usize]
            .iter()
            .map(|&r| (r, 0))
            .collect();
        let mut kernels: Vec<Vec<Item>> = vec![start_kernel.clone()];
        let mut state_of: HashMap<Vec<Item>, u32> = HashMap::new();
        state_of.insert(start_kernel, 0);
        let mut transitions: Vec<Vec<(Sym, u32)>> = Vec::new();
        let mut s = 0;
        while s < kernels.len() {
            let closure = self.lr0_closure(&kernels[s]);
            let mut by_sym: Vec<(Sym, Vec<Item>)> = Vec::new();
            for it in closure {
                if let Some(x) = self.next_sym(it) {
                    let adv = (it.0, it.1 + 1);
                    match by_sym.iter_mut().find(|(y, _)| *y == x) {
                        Some((_, v)) => v.push(adv),
                        None => by_sym.push((x, vec![adv])),
                    }
                }
            }
            let mut trans = Vec::new();
            for (x, mut k) in by_sym {
                k.sort_unstable();
                k.dedup();
                let id = match state_of.get(&k) {
                    Some(&id) => id,
                    None => {
                        let id = kernels.len() as u32;
                        state_of.insert(k.clone(), id);
                        kernels.push(k);
                        id
                    }
                };
                trans.push((x, id));
            }
            transitions.push(trans);
            s += 1;
        }
        let n_states = kernels.len();

        // Lookahead sets per kernel item.
        let kidx: Vec<HashMap<Item, usize>> = kernels
            .iter()
            .map(|k| k.iter().enumerate().map(|(i, it)| (*it, i)).collect())
            .collect();
        let mut la: Vec<Vec<TermSet>> = kernels
            .iter()
            .map(|k| vec![TermSet::default(); k.len()])
            .collect();
        let mut prop: Vec<Vec<Vec<(u32, usize)>>> =
            kernels.iter().map(|k| vec![Vec::new(); k.len()]).collect();
        for i in 0..g.rules.len() {
            if g.rules[i].lhs == g.start {
                let k = kidx[0][&(i as u32, 0)];
                la[0][k].insert(g.eof as usize);
            }
        }
        for st in 0..n_states {
            for (ki, &kit) in kernels[st].iter().enumerate() {
                let mut dummy = TermSet::default();
                dummy.insert(self.hash);
                for ((r, d), set) in self.lr1_closure(&[(kit, dummy)]) {
                    let Some(x) = self.next_sym((r, d)) else {
                        continue;
                    };
                    let target = transitions[st].iter().find(|(y, _)| *y == x).unwrap().1;
                    let tk = kidx[target as usize][&(r, d + 1)];
                    for t in set.iter() {
                        if t == self.hash {
                            prop[st][ki].push((target, tk));
                        } else {
                            la[target as usize][tk].insert(t);
                        }
                    }
                }
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for st in 0..n_states {
                for ki in 0..kernels[st].len() {
                    let src = la[st][ki];
                    for &(ts, tk) in &prop[st][ki] {
                        changed |= la[ts as usize][tk].union(&src);
                    }
                }
            }
        }

        // Tables.
        let mut action = vec![Action::Error; n_states * nt];
        let mut goto = vec![NO_STATE; n_states * nn];
        let mut conflicts = Vec::new();
        for st in 0..n_states {
            for &(x, target) in &transitions[st] {
                match x {
                    Sym::T(t) => action[st * nt + t as usize] = Action::Shift(target),
                    Sym::N(n) => goto[st * nn + n as usize] = target,
                }
            }
            let kernel: Vec<(Item, TermSet)> = kernels[st]
                .iter()
                .zip(&la[st])
                .map(|(it, s)| (*it, *s))
                .collect();
            let closure = if kernel.iter().any(|(it, _)| self.next_sym(*it).is_some()) {
                self.lr1_closure(&kernel)
            } else {
                kernel
            };
            for ((r, d), set) in closure {
                if (d as usize) < g.rules[r as usize].rhs.len() {
                    continue;
                }
                let accept = g.rules[r as usize].lhs == g.start;
                for t in set.iter() {
                    let cell = &mut action[st * nt + t];
                    let new = if accept { Action::Accept } else { Action::Reduce(r) };
                    match *cell {
                        Action::Error => *cell = new,
                        Action::Shift(_) => conflicts.push(Conflict::ShiftReduce {
                            state: st as u32,
                            terminal: t as u16,
                            rule: r,
                        }),
                        Action::Reduce(old) => {
                            let (kept, dropped) = if old < r { (old, r) } else { (r, old) };
                            *cell = Action::Reduce(kept);
                            conflicts.push(Conflict::ReduceReduce {
                                state: st as u32,
                                terminal: t as u16,
                                kept,
                                dropped,
                            });
                        }
                        Action::Accept => {}
                    }
                }
            }
        }
        let default_reduce = (0..n_states)
            .map(|st| {
                let row = &action[st * nt..(st + 1) * nt];
                let mut only = None;
                for a in row {
                    match *a {
                        Action::Error => {}
                        Action::Reduce(r) if only.is_none() || only == Some(r) => only = Some(r),
                        _ => return None,
                    }
                }
                only
            })
            .collect();
        Tables {
            n_states,
            n_terminals: nt,
            n_nonterminals: nn,
            action,
            goto,
            default_reduce,
            conflicts,
        }
    }
}

pub fn build_tables(g: &SymGrammar) -> Tables {
    Builder::new(g).build()
}
