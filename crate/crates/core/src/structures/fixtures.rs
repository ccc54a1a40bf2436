//! Small named structures used throughout the tests and the CLI.

use super::{Structure, Vocabulary};

fn graph(elements: &[&str], edges: &[(&str, &str)]) -> Structure {
    edges
        .iter()
        .fold(Structure::builder(Vocabulary::graph()).elements(elements.iter().copied()), |b, (x, y)| {
            b.edge("E", x, y)
        })
        .build()
        .expect("fixture is well formed")
}

/// Single symmetric edge `x - y`.
pub fn k2() -> Structure {
    graph(&["x", "y"], &[("x", "y")])
}

pub fn k3() -> Structure {
    graph(&["x", "y", "z"], &[("x", "y"), ("y", "z"), ("x", "z")])
}

/// Path `a - b - c`.
pub fn p3() -> Structure {
    graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")])
}

pub fn c4() -> Structure {
    cycle(4)
}

/// One vertex with a loop.
pub fn loop1() -> Structure {
    Structure::builder(Vocabulary::graph())
        .element("x")
        .tuple("E", ["x", "x"])
        .build()
        .expect("fixture is well formed")
}

/// One vertex, no tuples.
pub fn pt1() -> Structure {
    graph(&["x"], &[])
}

/// Symmetric cycle on `v0 .. v{n-1}`; for `n = 4` the elements are `a..d`.
pub fn cycle(n: usize) -> Structure {
    let names: Vec<String> = if n == 4 {
        ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect()
    } else {
        (0..n).map(|i| format!("v{i}")).collect()
    };
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let mut tuples = Vec::new();
    for (x, y) in edges {
        tuples.push(vec![x, y]);
        tuples.push(vec![y, x]);
    }
    Structure::from_parts(Vocabulary::graph(), names, vec![tuples], Vec::new())
        .expect("cycle is well formed")
}

pub const NAMES: [&str; 6] = ["K2", "K3", "P3", "C4", "LOOP1", "PT1"];

/// Looks up a bundled fixture by (case-insensitive) name.
pub fn by_name(name: &str) -> Option<Structure> {
    match name.to_ascii_uppercase().as_str() {
        "K2" => Some(k2()),
        "K3" => Some(k3()),
        "P3" => Some(p3()),
        "C4" => Some(c4()),
        "LOOP1" => Some(loop1()),
        "PT1" => Some(pt1()),
        _ => None,
    }
}
