use super::{Pauli, PauliString, PauliSum};

/// Terms of a [`PauliSum`] that can be read out with one basis-change circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct QwcGroup {
    /// Measurement axis per qubit; identity where no member acts.
    pub basis: PauliString,
    /// Indices into the parent sum's term list.
    pub members: Vec<usize>,
}

impl QwcGroup {
    pub fn axis(&self, qubit: usize) -> Pauli {
        self.basis.get(qubit)
    }

    fn accepts(&self, p: &PauliString) -> bool {
        // Where both act, the factors must be identical.
        let both = self.basis.support() & p.support();
        (self.basis.x_mask() ^ p.x_mask()) & both == 0 && (self.basis.z_mask() ^ p.z_mask()) & both == 0
    }

    fn absorb(&mut self, index: usize, p: &PauliString) {
        let x = self.basis.x_mask() | p.x_mask();
        let z = self.basis.z_mask() | p.z_mask();
        self.basis = PauliString::from_masks(p.n_qubits(), x, z).expect("same width");
        self.members.push(index);
    }
}

/// Partition the non-identity terms into qubit-wise commuting groups.
///
/// Greedy first fit over terms ordered by descending coefficient magnitude
/// (ties keep term order). The identity term belongs to no group.
pub fn qwc_group(h: &PauliSum) -> Vec<QwcGroup> {
    let mut order: Vec<(usize, PauliString, f64)> = h
        .terms()
        .enumerate()
        .filter(|(_, (p, _))| !p.is_identity())
        .map(|(i, (p, c))| (i, *p, c.norm()))
        .collect();
    order.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));

    let mut groups: Vec<QwcGroup> = Vec::new();
    for (index, p, _) in order {
        match groups.iter_mut().find(|g| g.accepts(&p)) {
            Some(g) => g.absorb(index, &p),
            None => {
                let mut g = QwcGroup {
                    basis: PauliString::identity(h.n_qubits()),
                    members: Vec::new(),
                };
                g.absorb(index, &p);
                groups.push(g);
            }
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_example() {
        let h = PauliSum::from_labels(&[(1.0, "ZI"), (0.5, "ZZ"), (0.25, "XX")]).unwrap();
        let groups = qwc_group(&h);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].basis.to_string(), "ZZ");
        assert_eq!(groups[0].members, vec![0, 1]);
        assert_eq!(groups[1].basis.to_string(), "XX");
        assert_eq!(groups[1].members, vec![2]);
    }

    #[test]
    fn identity_only() {
        let h = PauliSum::from_labels(&[(2.0, "II")]).unwrap();
        assert!(qwc_group(&h).is_empty());
        assert_eq!(h.constant(), 2.0);
    }

    #[test]
    fn members_are_pairwise_qubitwise_commuting() {
        let h = PauliSum::from_labels(&[
            (0.3, "XZIY"),
            (0.2, "XIIY"),
            (0.9, "ZZZZ"),
            (0.1, "IZIY"),
            (0.4, "YYXX"),
            (0.05, "IIXI"),
        ])
        .unwrap();
        let groups = qwc_group(&h);
        let mut seen = vec![];
        for g in &groups {
            for &a in &g.members {
                seen.push(a);
                for &b in &g.members {
                    let pa = h.term(a).unwrap().0;
                    let pb = h.term(b).unwrap().0;
                    assert!(pa.qubitwise_commutes_with(pb));
                }
            }
        }
        seen.sort();
        assert_eq!(seen, (0..h.len()).collect::<Vec<_>>());
    }
}
