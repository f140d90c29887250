//! Prefix-suffix words that survive every context: the sets `I_δ`.
//!
//! A word `β` belongs to `I_δ` when some `α`, `γ` with `αβ, βγ ∈ Γ` and some
//! contexts `x`, `y` of length `δ` make `xαβγy` free of Γ-occurrences that
//! overhang `β` on both sides. Contexts are explored as tries: only letters
//! that keep a straddling word alive need branching, so the search never
//! enumerates `|D|^δ` strings.

use std::collections::BTreeSet;

use super::bank::{prefix_suffix_words, PatternBank, Symbol, Word};

/// A Γ-occurrence `lβr` with `l`, `r` non-empty.
#[derive(Clone, Debug)]
struct Straddle {
    l: Vec<Symbol>,
    r: Vec<Symbol>,
}

/// Candidate `β` with its `(α, γ)` witnesses and its straddling words.
#[derive(Clone, Debug)]
pub(crate) struct TildeCandidate {
    pub beta: Word,
    pub witnesses: Vec<(usize, usize)>,
    straddles: Vec<Straddle>,
}

#[derive(Clone, Debug)]
pub(crate) struct TildeIndex {
    pub candidates: Vec<TildeCandidate>,
    alphabet_size: usize,
}

impl TildeIndex {
    pub fn new(gamma: &[Word], alphabet_size: usize) -> Self {
        let mut betas: Vec<Word> = vec![Word::empty()];
        betas.extend(prefix_suffix_words(gamma));
        let candidates = betas
            .into_iter()
            .map(|beta| {
                let b = beta.len();
                let lefts: BTreeSet<usize> =
                    gamma.iter().filter(|w| beta.is_suffix_of(w)).map(|w| w.len() - b).collect();
                let rights: BTreeSet<usize> =
                    gamma.iter().filter(|w| beta.is_prefix_of(w)).map(|w| w.len() - b).collect();
                let mut witnesses = Vec::new();
                for &a in &lefts {
                    for &g in &rights {
                        witnesses.push((a, g));
                    }
                }
                let mut straddles = Vec::new();
                for u in gamma {
                    for o in 1..u.len() {
                        if o + b < u.len() && u.0[o..o + b] == beta.0[..] {
                            straddles.push(Straddle { l: u.0[..o].to_vec(), r: u.0[o + b..].to_vec() });
                        }
                    }
                }
                TildeCandidate { beta, witnesses, straddles }
            })
            .collect();
        TildeIndex { candidates, alphabet_size }
    }

    /// Whether some witness `(α, γ)` of `cand` admits free contexts. `lens`
    /// maps the witness lengths `(|α|, |γ|)` to the context lengths, or to
    /// `None` when the witness does not fit.
    pub fn admits(
        &self,
        cand: &TildeCandidate,
        gamma: &[Word],
        lens: impl Fn(usize, usize) -> Option<(usize, usize)>,
    ) -> bool {
        let b = cand.beta.len();
        cand.witnesses.iter().any(|&(a, g)| {
            let Some((dl, dr)) = lens(a, g) else { return false };
            // any Γ word ending in β of the right length gives α; likewise γ
            gamma.iter().filter(|w| w.len() == a + b && cand.beta.is_suffix_of(w)).any(|wl| {
                gamma.iter().filter(|w| w.len() == b + g && cand.beta.is_prefix_of(w)).any(|wr| {
                    let alpha = &wl.0[..a];
                    let gam = &wr.0[b..];
                    context_free(&cand.straddles, alpha, gam, dl, dr, self.alphabet_size)
                })
            })
        })
    }
}

/// Whether `x ∈ D^dl`, `y ∈ D^dr` exist such that no straddle `lβr` occurs
/// in `xαβγy` with `l` ending right before `β` and `r` starting right after.
fn context_free(
    straddles: &[Straddle],
    alpha: &[Symbol],
    gamma: &[Symbol],
    dl: usize,
    dr: usize,
    k: usize,
) -> bool {
    // straddles fixed by α alone, and those that need a suffix l' of x
    let mut fixed: Vec<usize> = Vec::new();
    let mut open: Vec<(usize, &[Symbol])> = Vec::new();
    for (i, st) in straddles.iter().enumerate() {
        if st.l.len() <= alpha.len() {
            if alpha.ends_with(&st.l) {
                fixed.push(i);
            }
        } else if st.l.ends_with(alpha) {
            let lp = &st.l[..st.l.len() - alpha.len()];
            if lp.len() <= dl {
                open.push((i, lp));
            }
        }
    }
    let mut x = Vec::new();
    left_dfs(straddles, &fixed, &open, &mut x, dl, gamma, dr, k)
}

#[allow(clippy::too_many_arguments)]
fn left_dfs(
    straddles: &[Straddle],
    fixed: &[usize],
    open: &[(usize, &[Symbol])],
    x: &mut Vec<Symbol>,
    dl: usize,
    gamma: &[Symbol],
    dr: usize,
    k: usize,
) -> bool {
    // x holds the context's last letters, nearest to α last
    let pending = open.iter().any(|(_, lp)| lp.len() > x.len() && lp.ends_with(x));
    if !pending || x.len() == dl {
        let matched = fixed
            .iter()
            .copied()
            .chain(open.iter().filter(|(_, lp)| x.ends_with(lp)).map(|&(i, _)| i));
        let mut forbidden: Vec<&[Symbol]> = Vec::new();
        for i in matched {
            let r = &straddles[i].r[..];
            if r.len() <= gamma.len() {
                if gamma.starts_with(r) {
                    return false;
                }
            } else if r.starts_with(gamma) {
                forbidden.push(&r[gamma.len()..]);
            }
        }
        return avoidable(&forbidden, dr, k);
    }
    for c in 0..k as Symbol {
        x.insert(0, c);
        let ok = left_dfs(straddles, fixed, open, x, dl, gamma, dr, k);
        x.remove(0);
        if ok {
            return true;
        }
    }
    false
}

/// Whether some `y ∈ D^depth` has none of `forbidden` as a prefix.
fn avoidable(forbidden: &[&[Symbol]], depth: usize, k: usize) -> bool {
    if forbidden.iter().any(|r| r.is_empty()) {
        return false;
    }
    if forbidden.is_empty() || depth == 0 {
        return true;
    }
    (0..k as Symbol).any(|c| {
        let next: Vec<&[Symbol]> =
            forbidden.iter().filter(|r| r[0] == c).map(|r| &r[1..]).collect();
        avoidable(&next, depth - 1, k)
    })
}

/// `I_δ` for a given context length; the empty word is included when it
/// qualifies.
pub fn compute_i_delta(bank: &PatternBank, delta: usize) -> BTreeSet<Word> {
    let gamma = bank.gamma();
    let index = TildeIndex::new(&gamma, bank.alphabet().len());
    index
        .candidates
        .iter()
        .filter(|c| index.admits(c, &gamma, |_, _| Some((delta, delta))))
        .map(|c| c.beta.clone())
        .collect()
}

/// `(I_0, I_∞)`; the limit is reached at `δ = ℓ_max`.
pub fn compute_i_limit(bank: &PatternBank) -> (BTreeSet<Word>, BTreeSet<Word>) {
    (compute_i_delta(bank, 0), compute_i_delta(bank, bank.ell_max()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::bank::Alphabet;

    fn bank(alpha: &str, words: &[&str]) -> PatternBank {
        let mut b = PatternBank::new(Alphabet::from_chars(alpha).unwrap(), 8).unwrap();
        for w in words {
            b.add(w, 0.0).unwrap();
        }
        b
    }

    fn fmt(b: &PatternBank, set: &BTreeSet<Word>) -> Vec<String> {
        set.iter().map(|w| b.alphabet().format_word(w)).collect()
    }

    /// `β ∈ I_δ` by enumerating every context pair.
    fn brute_i_delta(b: &PatternBank, delta: usize) -> BTreeSet<Word> {
        let gamma = b.gamma();
        let k = b.alphabet().len() as u32;
        let mut betas = vec![Word::empty()];
        betas.extend(prefix_suffix_words(&gamma));
        let contexts: Vec<Vec<Symbol>> = (0..k.pow(delta as u32))
            .map(|mut code| {
                (0..delta)
                    .map(|_| {
                        let c = code % k;
                        code /= k;
                        c
                    })
                    .collect()
            })
            .collect();
        betas
            .into_iter()
            .filter(|beta| {
                gamma.iter().filter(|w| beta.is_suffix_of(w)).any(|wl| {
                    gamma.iter().filter(|w| beta.is_prefix_of(w)).any(|wr| {
                        let alpha = &wl.0[..wl.len() - beta.len()];
                        let gam = &wr.0[beta.len()..];
                        contexts.iter().any(|x| {
                            contexts.iter().any(|y| {
                                let text: Vec<Symbol> = x
                                    .iter()
                                    .chain(alpha)
                                    .chain(&beta.0)
                                    .chain(gam)
                                    .chain(y)
                                    .copied()
                                    .collect();
                                let p = x.len() + alpha.len();
                                let q = p + beta.len();
                                !gamma.iter().any(|u| {
                                    (0..=text.len().saturating_sub(u.len())).any(|a| {
                                        a + u.len() <= text.len()
                                            && text[a..a + u.len()] == u.0[..]
                                            && a < p
                                            && a + u.len() > q
                                    })
                                })
                            })
                        })
                    })
                })
            })
            .collect()
    }

    #[test]
    fn single_letter() {
        let b = bank("a", &["a"]);
        let (i0, inf) = compute_i_limit(&b);
        assert_eq!(fmt(&b, &i0), vec!["", "a"]);
        assert_eq!(inf, i0);
    }

    #[test]
    fn chain_on_binary_bank() {
        let b = bank("01", &["0", "1", "1000", "1010"]);
        let (i0, inf) = compute_i_limit(&b);
        assert!(inf.is_subset(&i0));
        let mut universe = prefix_suffix_words(&b.gamma());
        universe.insert(Word::empty());
        assert!(i0.is_subset(&universe));
    }

    #[test]
    fn matches_enumeration() {
        let cases: &[(&str, &[&str])] = &[
            ("01", &["0", "1", "1000", "1010"]),
            ("ab", &["a", "b", "ab"]),
            ("ab", &["ab", "abab", "ba"]),
            ("abc", &["abc", "bca", "cab", "a"]),
            ("ab", &["aa", "aba", "b"]),
        ];
        for (alpha, words) in cases {
            let b = bank(alpha, words);
            for delta in 0..=b.ell_max() {
                assert_eq!(
                    compute_i_delta(&b, delta),
                    brute_i_delta(&b, delta),
                    "{words:?} δ={delta}"
                );
            }
        }
    }
}
