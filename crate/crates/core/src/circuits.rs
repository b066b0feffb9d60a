//! Small reference designs: adders, chains, trees and seeded random AIGs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netcore::{parse_aiger, BooleanNetwork, Fanin, GateKind, NetworkBuilder, NodeId};

/// One-bit full adder as an AIG.
pub const FULL_ADDER_AAG: &str = "aag 11 3 0 2 8\n2\n4\n6\n19\n23\n8 2 4\n10 3 5\n12 9 11\n14 6 13\n16 7 12\n18 15 17\n20 6 12\n22 9 21\ni0 A\ni1 B\ni2 Cin\no0 SUM\no1 Cout\n";

fn not(f: Fanin) -> Fanin {
    Fanin { node: f.node, complemented: !f.complemented }
}

fn and(b: &mut NetworkBuilder, x: Fanin, y: Fanin) -> Fanin {
    Fanin::plain(b.and(x, y))
}

fn or(b: &mut NetworkBuilder, x: Fanin, y: Fanin) -> Fanin {
    not(and(b, not(x), not(y)))
}

/// `(x | y) & !(x & y)` in three ANDs.
fn xor(b: &mut NetworkBuilder, x: Fanin, y: Fanin) -> Fanin {
    let both = and(b, x, y);
    let neither = and(b, not(x), not(y));
    and(b, not(both), not(neither))
}

pub fn full_adder_aig() -> BooleanNetwork {
    parse_aiger(FULL_ADDER_AAG.as_bytes()).expect("built-in full adder parses")
}

pub fn full_adder_xag() -> BooleanNetwork {
    let mut b = NetworkBuilder::new();
    let a = Fanin::plain(b.pi("A"));
    let c = Fanin::plain(b.pi("B"));
    let cin = Fanin::plain(b.pi("Cin"));
    let x = Fanin::plain(b.xor(a, c));
    let sum = b.xor(cin, x);
    let ab = b.and(a, c);
    let cx = b.and(cin, x);
    let cout = b.or(Fanin::plain(ab), Fanin::plain(cx));
    b.po("SUM", Fanin::plain(sum));
    b.po("Cout", Fanin::plain(cout));
    b.build().expect("valid full adder")
}

/// `bits`-wide ripple-carry adder as an AIG. Inputs are `A0..`, then `B0..`;
/// outputs are `S0..` followed by the carry of every stage `CO0..`.
pub fn ripple_carry_adder(bits: usize) -> BooleanNetwork {
    let mut b = NetworkBuilder::new();
    let a: Vec<Fanin> = (0..bits).map(|i| Fanin::plain(b.pi(format!("A{i}")))).collect();
    let c: Vec<Fanin> = (0..bits).map(|i| Fanin::plain(b.pi(format!("B{i}")))).collect();
    let mut sums = Vec::with_capacity(bits);
    let mut carries = Vec::with_capacity(bits);
    let mut carry: Option<Fanin> = None;
    for i in 0..bits {
        let p = xor(&mut b, a[i], c[i]);
        let g = and(&mut b, a[i], c[i]);
        let (s, co) = match carry {
            None => (p, g),
            Some(ci) => {
                let s = xor(&mut b, p, ci);
                let pc = and(&mut b, p, ci);
                (s, or(&mut b, g, pc))
            }
        };
        sums.push(s);
        carries.push(co);
        carry = Some(co);
    }
    for (i, s) in sums.into_iter().enumerate() {
        b.po(format!("S{i}"), s);
    }
    for (i, co) in carries.into_iter().enumerate() {
        b.po(format!("CO{i}"), co);
    }
    b.build().expect("valid adder")
}

/// PI followed by `len` buffers/inverters in alternation, then a PO.
pub fn chain(len: usize) -> BooleanNetwork {
    let mut b = NetworkBuilder::new();
    let mut cur = b.pi("a");
    for i in 0..len {
        let kind = if i % 2 == 0 { GateKind::Buf } else { GateKind::Inv };
        cur = b.gate(kind, &[Fanin::plain(cur)]);
    }
    b.po("o", Fanin::plain(cur));
    b.build().expect("valid chain")
}

/// Two inputs feeding an AND and an OR that reconverge at an XOR.
pub fn diamond() -> BooleanNetwork {
    let mut b = NetworkBuilder::new();
    let x = Fanin::plain(b.pi("a"));
    let y = Fanin::plain(b.pi("b"));
    let l = Fanin::plain(b.and(x, y));
    let r = Fanin::plain(b.or(x, y));
    let j = b.xor(l, r);
    b.po("o", Fanin::plain(j));
    b.build().expect("valid diamond")
}

/// AND of `width` inputs as a balanced tree (`balanced`) or a left-leaning chain.
pub fn and_tree(width: usize, balanced: bool) -> BooleanNetwork {
    let mut b = NetworkBuilder::new();
    let mut layer: Vec<NodeId> = (0..width).map(|i| b.pi(format!("x{i}"))).collect();
    if balanced {
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            for pair in layer.chunks(2) {
                next.push(match pair {
                    [l, r] => b.and(Fanin::plain(*l), Fanin::plain(*r)),
                    [x] => *x,
                    _ => unreachable!(),
                });
            }
            layer = next;
        }
    } else {
        let mut acc = layer[0];
        for &x in &layer[1..] {
            acc = b.and(Fanin::plain(acc), Fanin::plain(x));
        }
        layer = vec![acc];
    }
    b.po("F", Fanin::plain(layer[0]));
    b.build().expect("valid tree")
}

/// Random AIG with `pis` inputs and `ands` gates. Operands are drawn from
/// earlier nodes, half the time from the most recent ones to build depth;
/// every gate left without fanout drives its own PO.
pub fn random_aig(pis: usize, ands: usize, seed: u64) -> BooleanNetwork {
    assert!(pis >= 2, "random AIGs need at least two inputs");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetworkBuilder::new();
    let mut pool: Vec<NodeId> = (0..pis).map(|i| b.pi(format!("x{i}"))).collect();
    let mut used = vec![false; pis + ands];
    let pick = |rng: &mut ChaCha8Rng, pool: &[NodeId]| {
        let n = pool.len();
        if rng.gen_bool(0.5) {
            pool[rng.gen_range(n.saturating_sub(16)..n)]
        } else {
            pool[rng.gen_range(0..n)]
        }
    };
    for _ in 0..ands {
        let x = pick(&mut rng, &pool);
        let mut y = pick(&mut rng, &pool);
        while y == x {
            y = pick(&mut rng, &pool);
        }
        used[x] = true;
        used[y] = true;
        let fx = Fanin { node: x, complemented: rng.gen() };
        let fy = Fanin { node: y, complemented: rng.gen() };
        pool.push(b.and(fx, fy));
    }
    for (&v, k) in pool[pis..].iter().zip(0..) {
        if !used[v] {
            b.po(format!("y{k}"), Fanin::plain(v));
        }
    }
    b.build().expect("valid random AIG")
}

/// The ten reference designs used for whole-pipeline checks.
pub fn desk_suite() -> Vec<(String, BooleanNetwork)> {
    vec![
        ("full_adder_aig".into(), full_adder_aig()),
        ("full_adder_xag".into(), full_adder_xag()),
        ("cra4".into(), ripple_carry_adder(4)),
        ("chain8".into(), chain(8)),
        ("diamond".into(), diamond()),
        ("and_tree_balanced8".into(), and_tree(8, true)),
        ("and_tree_chained8".into(), and_tree(8, false)),
        ("random50".into(), random_aig(8, 50, 1)),
        ("random200".into(), random_aig(12, 200, 2)),
        ("random500".into(), random_aig(20, 500, 3)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add(net: &BooleanNetwork, bits: usize, x: u64, y: u64) -> u64 {
        let inputs: Vec<bool> = (0..bits).map(|i| x >> i & 1 == 1).chain((0..bits).map(|i| y >> i & 1 == 1)).collect();
        let out = net.evaluate_values(&inputs).unwrap();
        let sum = (0..bits).fold(0, |acc, i| acc | (out[i] as u64) << i);
        sum | (out[2 * bits - 1] as u64) << bits
    }

    #[test]
    fn cra_adds() {
        let net = ripple_carry_adder(4);
        assert_eq!((net.pis().len(), net.pos().len()), (8, 8));
        for x in 0..16 {
            for y in 0..16 {
                assert_eq!(add(&net, 4, x, y), x + y);
            }
        }
    }

    #[test]
    fn full_adders_agree() {
        let (aig, xag) = (full_adder_aig(), full_adder_xag());
        for w in 0..8u64 {
            let bits: Vec<bool> = (0..3).map(|i| w >> i & 1 == 1).collect();
            assert_eq!(aig.evaluate_values(&bits).unwrap(), xag.evaluate_values(&bits).unwrap());
        }
    }

    #[test]
    fn tree_depths() {
        assert_eq!(and_tree(4, true).depth(), 3);
        assert_eq!(and_tree(4, false).depth(), 4);
        assert_eq!(chain(5).depth(), 6);
    }

    #[test]
    fn random_aig_is_seeded() {
        let a = random_aig(8, 50, 7);
        assert_eq!(a, random_aig(8, 50, 7));
        assert_ne!(a, random_aig(8, 50, 8));
        assert_eq!(a.count_kind(GateKind::And2), 50);
        assert!(!a.pos().is_empty());
    }
}
