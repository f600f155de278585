//! Character trie for enumerating vocabulary pieces matching at a position.

use alloc::vec;
use alloc::vec::Vec;

const NO_PIECE: u32 = u32::MAX;

struct Node {
    /// Children sorted by character for binary-search descent.
    children: Vec<(char, u32)>,
    piece: u32,
}

impl Default for Node {
    fn default() -> Self {
        Node {
            children: Vec::new(),
            piece: NO_PIECE,
        }
    }
}

/// Maps character sequences to piece ids; supports walking all pieces that
/// start at a given position of a word.
pub(crate) struct CharTrie {
    nodes: Vec<Node>,
}

impl CharTrie {
    pub(crate) fn new() -> Self {
        CharTrie {
            nodes: vec![Node::default()],
        }
    }

    pub(crate) fn insert(&mut self, chars: impl Iterator<Item = char>, piece: u32) {
        debug_assert_ne!(piece, NO_PIECE);
        let mut node = 0usize;
        for c in chars {
            node = match self.nodes[node].children.binary_search_by_key(&c, |e| e.0) {
                Ok(i) => self.nodes[node].children[i].1 as usize,
                Err(i) => {
                    let next = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    self.nodes[node].children.insert(i, (c, next));
                    next as usize
                }
            };
        }
        self.nodes[node].piece = piece;
    }

    /// Calls `f(len, piece)` for every piece equal to a prefix of
    /// `word[start..]`, in increasing length order.
    pub(crate) fn matches_from(&self, word: &[char], start: usize, mut f: impl FnMut(usize, u32)) {
        let mut node = 0usize;
        for (offset, &c) in word[start..].iter().enumerate() {
            match self.nodes[node].children.binary_search_by_key(&c, |e| e.0) {
                Ok(i) => node = self.nodes[node].children[i].1 as usize,
                Err(_) => return,
            }
            let piece = self.nodes[node].piece;
            if piece != NO_PIECE {
                f(offset + 1, piece);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn finds_all_prefix_pieces() {
        let mut trie = CharTrie::new();
        trie.insert("a".chars(), 0);
        trie.insert("ab".chars(), 1);
        trie.insert("abc".chars(), 2);
        trie.insert("b".chars(), 3);

        let word: Vec<char> = "abc".chars().collect();
        let mut hits = Vec::new();
        trie.matches_from(&word, 0, |len, id| hits.push((len, id)));
        assert_eq!(hits, [(1, 0), (2, 1), (3, 2)]);

        hits.clear();
        trie.matches_from(&word, 1, |len, id| hits.push((len, id)));
        assert_eq!(hits, [(1, 3)]);

        hits.clear();
        trie.matches_from(&word, 2, |len, id| hits.push((len, id)));
        assert!(hits.is_empty());
    }

    #[test]
    fn interior_nodes_are_not_pieces() {
        // Only the full string carries a piece; its prefixes must stay
        // silent even though their nodes exist.
        let mut trie = CharTrie::new();
        trie.insert("abc".chars(), 0);
        trie.insert("x".chars(), 7);

        let word: Vec<char> = "abcx".chars().collect();
        let mut hits = Vec::new();
        trie.matches_from(&word, 0, |len, id| hits.push((len, id)));
        assert_eq!(hits, [(3, 0)]);

        hits.clear();
        trie.matches_from(&word, 3, |len, id| hits.push((len, id)));
        assert_eq!(hits, [(1, 7)]);
    }
}
