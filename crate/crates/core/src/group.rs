//! Finite groups given by multiplication tables.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub labels: Vec<String>,
    /// `table[a][b]` is the index of `a·b`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inv: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = labels.len();
        let bad = |m: &str| Error::Validation(vec![format!("group table: {m}")]);
        if n == 0 {
            return Err(bad("no elements"));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(bad("table is not square over the labels"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| bad("no identity"))?;
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| table[a][b] == identity).ok_or_else(|| bad("missing inverse"))?;
            if table[inv[a]][a] != identity {
                return Err(bad("left and right inverses differ"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(bad(&format!(
                            "not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup { labels, table, identity, inv })
    }

    /// Parse a table of labels.
    pub fn from_labels(labels: Vec<String>, table: &[Vec<String>]) -> Result<FiniteGroup> {
        let t = table
            .iter()
            .map(|row| row.iter().map(|l| index_in(&labels, l)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FiniteGroup::new(labels, t)
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup { labels: vec!["e".into()], table: vec![vec![0]], identity: 0, inv: vec![0] }
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        let labels = (0..n).map(|i| if i == 0 { "e".to_string() } else { format!("g{i}") }).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(labels, table).expect("cyclic group")
    }

    /// `S_d` with `(πρ)(i) = π(ρ(i))`, and the permutations in element order.
    pub fn symmetric(d: usize) -> (FiniteGroup, Vec<Vec<usize>>) {
        let perms = permutations(d);
        let labels = perms.iter().map(|p| cycle_label(p)).collect();
        let index = |p: &[usize]| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index(&b.iter().map(|&i| a[i]).collect::<Vec<_>>())).collect())
            .collect();
        (FiniteGroup::new(labels, table).expect("symmetric group"), perms)
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        index_in(&self.labels, label)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order()).map(|a| self.element_order(a)).fold(1, num_integer::lcm)
    }

    pub fn is_homomorphism(&self, target: &FiniteGroup, map: &[usize]) -> bool {
        map.len() == self.order()
            && (0..self.order())
                .all(|a| (0..self.order()).all(|b| map[self.mul(a, b)] == target.mul(map[a], map[b])))
    }

    /// Direct product with labels `(a,b)`; element `(i, j)` has index `i·|other| + j`.
    pub fn product(&self, other: &FiniteGroup) -> FiniteGroup {
        let m = other.order();
        let n = self.order() * m;
        let labels = (0..n).map(|k| format!("({},{})", self.labels[k / m], other.labels[k % m])).collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| self.mul(a / m, b / m) * m + other.mul(a % m, b % m)).collect())
            .collect();
        FiniteGroup::new(labels, table).expect("product of groups")
    }

    /// Subgroup generated by a set, as a sorted set of indices.
    pub fn generated(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = [self.identity].into();
        let mut frontier = vec![self.identity];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let b = self.mul(a, g);
                if s.insert(b) {
                    frontier.push(b);
                }
            }
        }
        s
    }

    /// A subgroup as its own table, with the inclusion map.
    pub fn subgroup(&self, elems: &BTreeSet<usize>) -> Result<(FiniteGroup, Vec<usize>)> {
        let incl: Vec<usize> = elems.iter().copied().collect();
        let pos = |g: usize| incl.iter().position(|&h| h == g);
        let mut table = Vec::new();
        for &a in &incl {
            let mut row = Vec::new();
            for &b in &incl {
                row.push(pos(self.mul(a, b)).ok_or_else(|| Error::Validation(vec!["not a subgroup".into()]))?);
            }
            table.push(row);
        }
        let labels = incl.iter().map(|&g| self.labels[g].clone()).collect();
        Ok((FiniteGroup::new(labels, table)?, incl))
    }

    pub fn labels_of(&self, set: &BTreeSet<usize>) -> Vec<String> {
        set.iter().map(|&g| self.labels[g].clone()).collect()
    }

    pub fn set_from_labels(&self, labels: &[impl AsRef<str>]) -> Result<BTreeSet<usize>> {
        labels.iter().map(|l| self.index(l.as_ref())).collect()
    }
}

fn index_in(labels: &[String], l: &str) -> Result<usize> {
    labels
        .iter()
        .position(|x| x == l)
        .ok_or_else(|| Error::Validation(vec![format!("unknown group element `{l}`")]))
}

pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

/// Cycle notation, `e` for the identity.
pub fn cycle_label(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for i in 0..p.len() {
        if seen[i] || p[i] == i {
            continue;
        }
        let mut cyc = vec![];
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            cyc.push(j.to_string());
            j = p[j];
        }
        parts.push(format!("({})", cyc.join(" ")));
    }
    if parts.is_empty() {
        "e".into()
    } else {
        parts.concat()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_group_structure() {
        let (s3, perms) = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.exponent(), 6);
        assert_eq!(s3.labels[s3.identity], "e");
        let t = s3.index("(0 1)").unwrap();
        assert_eq!(s3.element_order(t), 2);
        assert_eq!(perms[t], vec![1, 0, 2]);
        let c = s3.index("(0 1 2)").unwrap();
        assert_eq!(s3.generated(&[c]).len(), 3);
        assert_eq!(s3.generated(&[c, t]).len(), 6);
    }

    #[test]
    fn rejects_bad_tables() {
        let l = vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroup::new(l.clone(), vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::new(l, vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn products_and_subgroups() {
        let g = FiniteGroup::cyclic(2).product(&FiniteGroup::cyclic(3));
        assert_eq!(g.order(), 6);
        assert_eq!(g.exponent(), 6);
        assert_eq!(g.labels[g.identity], "(e,e)");
        let (s3, _) = FiniteGroup::symmetric(3);
        let a3 = s3.generated(&[s3.index("(0 1 2)").unwrap()]);
        let (sub, incl) = s3.subgroup(&a3).unwrap();
        assert_eq!(sub.order(), 3);
        assert!(sub.is_homomorphism(&s3, &incl));
    }

    proptest! {
        #[test]
        fn cyclic_inverses(n in 1usize..12) {
            let g = FiniteGroup::cyclic(n);
            for a in 0..n {
                prop_assert_eq!(g.mul(a, g.inv[a]), g.identity);
            }
            prop_assert_eq!(g.exponent(), n);
        }
    }
}
