//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use pneq::net::{Marking, PlaceId};
use pneq::relations::{PlaceOrTheta, PlaceRelation};
use rand::Rng;

/// Tries every permutation of `m2`'s tokens against `m1`'s.
pub fn brute_additive(rel: &PlaceRelation, m1: &Marking, m2: &Marking) -> bool {
    let a: Vec<PlaceOrTheta> = m1.tokens().into_iter().map(PlaceOrTheta::Place).collect();
    let b: Vec<PlaceOrTheta> = m2.tokens().into_iter().map(PlaceOrTheta::Place).collect();
    a.len() == b.len() && any_permutation(&a, b, &|x, y| rel.contains(x, y))
}

/// Pads both sides with θ in every way that equalises their sizes and tries
/// every permutation; θ against θ is always allowed.
pub fn brute_d_additive(rel: &PlaceRelation, m1: &Marking, m2: &Marking) -> bool {
    let (n1, n2) = (m1.size() as usize, m2.size() as usize);
    for extra2 in 0..=n1 {
        let extra1 = n2 + extra2;
        if extra1 < n1 {
            continue;
        }
        let extra1 = extra1 - n1;
        let mut a: Vec<PlaceOrTheta> = m1.tokens().into_iter().map(PlaceOrTheta::Place).collect();
        a.extend(std::iter::repeat_n(PlaceOrTheta::Theta, extra1));
        let mut b: Vec<PlaceOrTheta> = m2.tokens().into_iter().map(PlaceOrTheta::Place).collect();
        b.extend(std::iter::repeat_n(PlaceOrTheta::Theta, extra2));
        let ok = |x: PlaceOrTheta, y: PlaceOrTheta| (x.is_theta() && y.is_theta()) || rel.contains(x, y);
        if any_permutation(&a, b, &ok) {
            return true;
        }
    }
    false
}

fn any_permutation(a: &[PlaceOrTheta], mut b: Vec<PlaceOrTheta>, ok: &dyn Fn(PlaceOrTheta, PlaceOrTheta) -> bool) -> bool {
    fn rec(a: &[PlaceOrTheta], b: &mut Vec<PlaceOrTheta>, i: usize, ok: &dyn Fn(PlaceOrTheta, PlaceOrTheta) -> bool) -> bool {
        if i == a.len() {
            return true;
        }
        for k in i..b.len() {
            b.swap(i, k);
            if ok(a[i], b[i]) && rec(a, b, i + 1, ok) {
                b.swap(i, k);
                return true;
            }
            b.swap(i, k);
        }
        false
    }
    rec(a, &mut b, 0, ok)
}

/// Relational composition straight from the definition, θ related to itself.
pub fn brute_compose(r1: &PlaceRelation, r2: &PlaceRelation) -> PlaceRelation {
    let mut mids: Vec<PlaceOrTheta> = r1.pairs().map(|(_, b)| b).chain(r2.pairs().map(|(a, _)| a)).collect();
    mids.push(PlaceOrTheta::Theta);
    let rel1 = |a: PlaceOrTheta, b: PlaceOrTheta| r1.contains(a, b) || (a.is_theta() && b.is_theta());
    let rel2 = |a: PlaceOrTheta, b: PlaceOrTheta| r2.contains(a, b) || (a.is_theta() && b.is_theta());
    let lefts: Vec<PlaceOrTheta> = r1.pairs().map(|(a, _)| a).chain([PlaceOrTheta::Theta]).collect();
    let rights: Vec<PlaceOrTheta> = r2.pairs().map(|(_, b)| b).chain([PlaceOrTheta::Theta]).collect();
    let mut out = PlaceRelation::new();
    for &a in &lefts {
        for &c in &rights {
            if a.is_theta() && c.is_theta() {
                continue;
            }
            if mids.iter().any(|&b| rel1(a, b) && rel2(b, c)) {
                out.insert(a, c).unwrap();
            }
        }
    }
    out
}

pub fn random_relation<R: Rng>(rng: &mut R, n: u32, density: f64, theta: bool) -> PlaceRelation {
    let sides: Vec<PlaceOrTheta> = (0..n)
        .map(|i| PlaceOrTheta::Place(PlaceId(i)))
        .chain(theta.then_some(PlaceOrTheta::Theta))
        .collect();
    let mut r = PlaceRelation::new();
    for &a in &sides {
        for &b in &sides {
            if !(a.is_theta() && b.is_theta()) && rng.gen_bool(density) {
                r.insert(a, b).unwrap();
            }
        }
    }
    r
}

pub fn random_marking<R: Rng>(rng: &mut R, n: u32, size: usize) -> Marking {
    Marking::from_places((0..size).map(|_| PlaceId(rng.gen_range(0..n)))).unwrap()
}

/// Small random net. Roughly a third of the transitions are τ-sequential.
pub fn random_net(seed: u64, places: u32, transitions: usize) -> pneq::Net {
    random_net_with(seed, places, transitions, 0.35)
}

/// As [`random_net`] with a chosen share of τ-sequential transitions.
pub fn random_net_with(seed: u64, places: u32, transitions: usize, tau_share: f64) -> pneq::Net {
    use pneq::net::{Label, NetBuilder};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetBuilder::new(format!("rand{seed}"));
    for i in 0..places {
        b.place(format!("p{i}"));
    }
    for t in 0..transitions {
        let (pre, label, post) = if rng.gen_bool(tau_share) {
            (random_marking(&mut rng, places, 1), Label::Tau, random_marking(&mut rng, places, 1))
        } else {
            let label = ["a", "b", "tau"][rng.gen_range(0..3)];
            let pre_size = rng.gen_range(1..=2);
            let post_size = rng.gen_range(0..=2);
            (random_marking(&mut rng, places, pre_size), Label::parse(label), random_marking(&mut rng, places, post_size))
        };
        b.transition(format!("t{t}"), pre, label, post);
    }
    b.build().unwrap()
}

/// Every acyclic τ-k-sequential σ from `start`, as its marking sequence,
/// found by trying every block order and every simple path per token.
pub fn brute_silent_sequences(net: &pneq::Net, start: &Marking) -> Vec<Vec<Marking>> {
    let graph = pneq::silent::silent_graph(net);
    fn paths(graph: &pneq::silent::SilentGraph, p: PlaceId) -> Vec<Vec<PlaceId>> {
        let mut out = vec![vec![p]];
        let mut stack = vec![vec![p]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            for &(_, q) in graph.successors(last) {
                if path[1..].contains(&q) {
                    continue;
                }
                let mut next = path.clone();
                next.push(q);
                out.push(next.clone());
                if q != path[0] {
                    stack.push(next);
                }
            }
        }
        out
    }
    let tokens = start.tokens();
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..tokens.len()).collect();
    permutations(&mut order, 0, &mut |ord| {
        let mut acc = vec![vec![start.clone()]];
        for &i in ord {
            let mut next = Vec::new();
            for seq in &acc {
                for path in paths(&graph, tokens[i]) {
                    let mut s = seq.clone();
                    let mut cur = s.last().unwrap().clone();
                    if path.len() == 1 {
                        s.push(cur.clone());
                    }
                    for w in path.windows(2) {
                        let mut ts = cur.tokens();
                        let k = ts.iter().position(|&x| x == w[0]).unwrap();
                        ts[k] = w[1];
                        cur = Marking::from_places(ts).unwrap();
                        s.push(cur.clone());
                    }
                    next.push(s);
                }
            }
            acc = next;
        }
        out.extend(acc);
    });
    out
}

fn permutations(v: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
    if i == v.len() {
        f(v);
        return;
    }
    for k in i..v.len() {
        v.swap(i, k);
        permutations(v, i + 1, f);
        v.swap(i, k);
    }
}
