use std::cmp::Ordering;

/// Dense exponent vector, one slot per ring variable.
///
/// The derived `Ord` is lexicographic with variable 0 most significant; this is
/// the storage order of [`Polynomial`](super::Polynomial) term maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e.into_boxed_slice())
    }

    #[inline]
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial(
            self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect(),
        ))
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn permuted(&self, perm: &[usize]) -> Monomial {
        // perm[new_index] = old_index
        Monomial(perm.iter().map(|&old| self.0[old]).collect())
    }
}

/// Monomial orders used by the symbolic layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MonomialOrder {
    Lex,
    DegRevLex,
    /// Variables `0..split` form the eliminated block, compared first by
    /// degree-reverse-lexicographic order; ties are broken by degrevlex on the
    /// remaining variables.
    Block {
        split: usize,
    },
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::DegRevLex => grevlex(&a.0, &b.0),
            MonomialOrder::Block { split } => {
                let split = split.min(a.0.len());
                grevlex(&a.0[..split], &b.0[..split]).then_with(|| grevlex(&a.0[split..], &b.0[split..]))
            }
        }
    }
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().rev().zip(b.iter().rev()) {
            if x != y {
                // smaller exponent in the last differing variable wins
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e.to_vec())
    }

    #[test]
    fn grevlex_classic_examples() {
        let o = MonomialOrder::DegRevLex;
        // x^2 y z^0 vs x y^3 (different degree)
        assert_eq!(o.cmp(&m(&[2, 1, 0]), &m(&[1, 3, 0])), Ordering::Less);
        // xy^2z vs x^2 z^2? degree 4 both: last var z: 1 vs 2 -> first is bigger
        assert_eq!(o.cmp(&m(&[1, 2, 1]), &m(&[2, 0, 2])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 1, 0])), Ordering::Greater);
    }

    #[test]
    fn block_order_eliminates_first_block() {
        let o = MonomialOrder::Block { split: 1 };
        // any power of variable 0 beats any monomial free of it
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 50])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 2]), &m(&[1, 1])), Ordering::Greater);
    }

    #[test]
    fn lcm_div() {
        let a = m(&[2, 0, 1]);
        let b = m(&[1, 3, 0]);
        let l = a.lcm(&b);
        assert_eq!(l, m(&[2, 3, 1]));
        assert_eq!(l.div(&a).unwrap(), m(&[0, 3, 0]));
        assert!(a.div(&b).is_none());
        assert!(!a.is_coprime(&b));
        assert!(m(&[1, 0, 0]).is_coprime(&m(&[0, 2, 1])));
    }
}
