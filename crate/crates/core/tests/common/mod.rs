#![allow(dead_code)]

pub mod checks;

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use koszulkit_core::algebra::{build_algebra, build_algebra_with_cap, TruncatedAlgebra};
use koszulkit_core::module::GradedModule;
use koszulkit_core::presentation::parse_presentation;
use koszulkit_core::resolution::{resolution_window, Resolution};
use koszulkit_core::{Field, Rationals};

pub type Alg = Arc<TruncatedAlgebra<Rationals>>;

pub struct Arrow<'a> {
    pub name: &'a str,
    pub from: &'a str,
    pub to: &'a str,
    pub weight: usize,
}

pub fn arrow<'a>(name: &'a str, from: &'a str, to: &'a str, weight: usize) -> Arrow<'a> {
    Arrow { name, from, to, weight }
}

/// Input document text; `limits` is `(weight_max, nilpotency_bound, hom_max, jpower_max)`.
pub fn document(vertices: &[&str], arrows: &[Arrow], rules: &[String], limits: (usize, usize, usize, usize)) -> String {
    let vs: Vec<String> = vertices.iter().map(|v| format!("\"{v}\"")).collect();
    let ars: Vec<String> = arrows
        .iter()
        .map(|a| {
            format!(
                "{{ name = \"{}\", from = \"{}\", to = \"{}\", weight = {} }}",
                a.name, a.from, a.to, a.weight
            )
        })
        .collect();
    let rs: Vec<String> = rules.iter().map(|r| format!("\"{r}\"")).collect();
    format!(
        "format = 1\n[field]\nkind = \"Q\"\n[quiver]\nvertices = [{}]\narrows = [{}]\n[relations]\nrules = [{}]\n\
         [limits]\nweight_max = {}\nnilpotency_bound = {}\nhom_max = {}\njpower_max = {}\n",
        vs.join(", "),
        ars.join(", "),
        rs.join(", "),
        limits.0,
        limits.1,
        limits.2,
        limits.3
    )
}

pub fn build(text: &str) -> Alg {
    Arc::new(build_algebra(&parse_presentation(text).unwrap(), &Rationals).unwrap())
}

fn rules(r: &[&str]) -> Vec<String> {
    r.iter().map(|s| s.to_string()).collect()
}

pub fn sjodin() -> Alg {
    build(&document(
        &["v"],
        &[arrow("x", "v", "v", 0), arrow("y", "v", "v", 0)],
        &rules(&["x*x + y*y*y", "x*y", "y*x"]),
        (1, 4, 5, 4),
    ))
}

pub fn cps() -> Alg {
    build(&document(
        &["a", "b", "b2", "a2", "c"],
        &[
            arrow("beta", "b", "a2", 0),
            arrow("delta", "a2", "b", 0),
            arrow("xi", "a2", "c", 0),
            arrow("zeta", "c", "a2", 0),
            arrow("epsilon", "a", "b", 1),
            arrow("gamma", "a", "b2", 0),
            arrow("alpha", "b2", "a2", 1),
        ],
        &rules(&[
            "alpha*xi",
            "zeta*xi",
            "zeta*delta",
            "gamma*alpha - epsilon*beta*xi*zeta",
            "delta*beta - xi*zeta",
        ]),
        (3, 6, 4, 3),
    ))
}

pub fn truncated_polynomial(power: usize, weight: usize) -> Alg {
    let word = vec!["x"; power].join("*");
    let d = if weight == 0 { 1 } else { 6 };
    let n = if weight == 0 { power } else { 1 };
    build(&document(&["v"], &[arrow("x", "v", "v", weight)], &[word], (d, n, 4, 4)))
}

pub fn a2() -> Alg {
    build(&document(&["a", "b"], &[arrow("x", "a", "b", 1)], &[], (3, 1, 3, 3)))
}

pub fn bend_back() -> Alg {
    build(&document(
        &["a", "b"],
        &[arrow("x", "a", "b", 0), arrow("y", "b", "a", 1)],
        &rules(&["x*y"]),
        (6, 2, 4, 4),
    ))
}

pub fn cyclic3() -> Alg {
    build(&document(
        &["a", "b", "c"],
        &[arrow("x", "a", "b", 1), arrow("y", "b", "c", 1), arrow("z", "c", "a", 1)],
        &[],
        (6, 1, 3, 3),
    ))
}

/// Minimal resolution of `A/J` within the standard window.
pub fn resolve_top(a: &Alg, n_max: usize) -> Resolution<Rationals> {
    let w = resolution_window(a, 0, n_max);
    Resolution::build(Arc::new(GradedModule::semisimple_top(a.clone(), w).unwrap()), n_max).unwrap()
}

pub struct Member {
    pub text: String,
    pub algebra: Alg,
}

/// Seeded random finite-dimensional presentations with total dimension at
/// most `max_dim`, deduplicated.
pub fn random_corpus(seed: u64, count: usize, max_dim: usize) -> Vec<Member> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 20_000, "random corpus generator stalled");
        let text = random_document(&mut rng);
        let Ok(p) = parse_presentation(&text) else { continue };
        // A small path cap rejects presentations that are far too big early.
        let Ok(a) = build_algebra_with_cap(&p, &Rationals, 400) else { continue };
        if !a.is_finite() || a.total_dim() > max_dim || a.total_dim() <= a.num_vertices() {
            continue;
        }
        if !seen.insert(text.clone()) {
            continue;
        }
        out.push(Member {
            text,
            algebra: Arc::new(a),
        });
    }
    out
}

/// The finite named fixtures followed by `random_corpus(seed, 24, 12)`.
pub fn property_corpus(seed: u64) -> Vec<Member> {
    let named = [
        ("sjodin", sjodin()),
        ("k[x]/(x^3), ungraded", truncated_polynomial(3, 0)),
        ("k[x]/(x^2), graded", truncated_polynomial(2, 1)),
        ("A2", a2()),
        ("bend-back", bend_back()),
    ];
    let mut c: Vec<Member> = named
        .into_iter()
        .map(|(name, algebra)| Member {
            text: name.to_string(),
            algebra,
        })
        .collect();
    c.extend(random_corpus(seed, 24, 12));
    c
}

/// A random document: up to three vertices, up to four arrows of weight 0 or
/// 1, random monomial and binomial relations of length two (and of mixed
/// length in weight 0), and most other paths of length three killed.
pub fn random_document(rng: &mut impl Rng) -> String {
    let names = ["p", "q", "r"];
    let nv = rng.gen_range(1..=3);
    let na = rng.gen_range(1..=4);
    let arrows: Vec<(String, usize, usize, usize)> = (0..na)
        .map(|i| {
            let w = if rng.gen_bool(0.65) { 1 } else { 0 };
            (format!("a{i}"), rng.gen_range(0..nv), rng.gen_range(0..nv), w)
        })
        .collect();
    let word = |p: &[usize]| p.iter().map(|&i| arrows[i].0.clone()).collect::<Vec<_>>().join("*");
    let weight = |p: &[usize]| p.iter().map(|&i| arrows[i].3).sum::<usize>();
    let ends = |p: &[usize]| (arrows[p[0]].1, arrows[*p.last().unwrap()].2);
    let mut rules = Vec::new();
    let twos = paths_of_length(&arrows, 2);
    let threes = paths_of_length(&arrows, 3);
    let mut kept = BTreeSet::new();
    let mut used = BTreeSet::new();
    for (i, p) in twos.iter().enumerate() {
        if used.contains(&i) {
            continue;
        }
        let roll: f64 = rng.gen();
        if roll < 0.4 {
            rules.push(word(p));
        } else if roll < 0.6 {
            let partner = (i + 1..twos.len())
                .find(|&j| !used.contains(&j) && ends(&twos[j]) == ends(p) && weight(&twos[j]) == weight(p));
            if let Some(j) = partner {
                used.insert(j);
                let c = rng.gen_range(1..=3);
                let sign = if rng.gen_bool(0.5) { "-" } else { "+" };
                rules.push(format!("{} {sign} {c}*{}", word(p), word(&twos[j])));
            }
        } else if roll < 0.8 && weight(p) == 0 {
            // Length-mixed relations such as x^2 + y^3 only exist in weight 0.
            let partner = threes.iter().find(|q| ends(q) == ends(p) && weight(q) == 0);
            if let Some(q) = partner {
                kept.insert(q.clone());
                rules.push(format!("{} + {}", word(p), word(q)));
            }
        }
    }
    for p in threes {
        if !kept.contains(&p) && rng.gen_bool(0.8) {
            rules.push(word(&p));
        }
    }
    let vertex_names: Vec<&str> = names[..nv].to_vec();
    let arrow_specs: Vec<Arrow> = arrows
        .iter()
        .map(|(n, s, t, w)| arrow(n, names[*s], names[*t], *w))
        .collect();
    document(&vertex_names, &arrow_specs, &rules, (6, 3, 3, 3))
}

/// Paths as arrow index lists in diagrammatic order; arrows are
/// `(name, source, target, weight)`.
fn paths_of_length(arrows: &[(String, usize, usize, usize)], len: usize) -> Vec<Vec<usize>> {
    let mut ps: Vec<Vec<usize>> = (0..arrows.len()).map(|i| vec![i]).collect();
    for _ in 1..len {
        let mut next = Vec::new();
        for p in ps {
            let last = arrows[*p.last().unwrap()].2;
            for (j, a) in arrows.iter().enumerate() {
                if a.1 == last {
                    let mut q = p.clone();
                    q.push(j);
                    next.push(q);
                }
            }
        }
        ps = next;
    }
    ps
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            for j in c + 1..cols {
                m[i][j] = (m[rank][c] * m[i][j] - m[i][c] * m[rank][j]) / prev;
            }
            m[i][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
    }
    rank
}

/// Field elements from small integers.
pub fn lift<F: Field>(f: &F, rows: &[Vec<i64>]) -> Vec<Vec<F::Elem>> {
    rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect()
}
