//! The labeled families of weak 2-chains and the published transfer arrows.

use serde::{Deserialize, Serialize};

use super::WeakChain;

/// A label with the weak 2-chains it stands for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelFamily {
    pub label: String,
    pub members: Vec<WeakChain>,
}

fn fam(label: &str, members: Vec<String>) -> LabelFamily {
    LabelFamily {
        label: label.to_string(),
        members: members
            .iter()
            .map(|m| m.parse().expect("label table entry"))
            .collect(),
    }
}

fn over<T: Copy>(values: &[T], f: impl Fn(T) -> String) -> Vec<String> {
    values.iter().map(|&v| f(v)).collect()
}

fn one(s: &str) -> Vec<String> {
    vec![s.to_string()]
}

/// The 33 labeled families, in table order.
pub fn labeled_families() -> Vec<LabelFamily> {
    vec![
        fam(
            "A",
            over(&[1, 2, 3, 4, 5], |a| format!("<342||342|000||1{a}1>")),
        ),
        fam("B", one("<342||3424|000||1314>")),
        fam(
            "C",
            over(&[2, 3, 5, 7, 8], |a| format!("<432||324|000||11{a}>")),
        ),
        fam("D", over(&[3, 4, 5], |a| format!("<432||342|000||1{a}1>"))),
        fam(
            "E",
            over(&[1, 2, 3, 4, 5], |a| format!("<432||432|000||{a}11>")),
        ),
        fam(
            "F",
            over(&[(1, 2), (2, 3), (3, 5), (4, 7), (5, 8)], |(a, b)| {
                format!("<432||4324|000||{a}11{b}>")
            }),
        ),
        fam("G", one("<432||3424|000||1415>")),
        fam(
            "H",
            over(&[2, 3, 4], |a| format!("<432||4342|000||{a}1{}1>", a + 1)),
        ),
        fam("I", one("<432||43424|000||31415>")),
        fam(
            "J",
            over(&[(1, 2), (1, 3), (2, 5), (3, 7), (3, 8)], |(a, b)| {
                format!("<4324||324|000{a}||11{b}>")
            }),
        ),
        fam("K", one("<4324||4324|0002||3115>")),
        fam("L", one("<4324||3424|0002||1415>")),
        fam("M", one("<4324||43424|0002||31415>")),
        fam("N", one("<3424||3424|0001||1314>")),
        fam(
            "O",
            over(&[3, 4, 5], |a| format!("<4342||342|0010||1{a}1>")),
        ),
        fam("P", one("<4342||3424|0010||1415>")),
        fam(
            "Q",
            over(&[3, 5], |a| format!("<4342||3424|0010||1{a}1{}>", a + 1)),
        ),
        fam("R", one("<4342||4342|0010||3141>")),
        fam("S", one("<4342||43424|0010||31415>")),
        fam("T", one("<43424||3424|00102||1415>")),
        fam("U", one("<342||423|000||112>")),
        fam("V", one("<342||3423|000||1112>")),
        // printed with block-0 shifts 0001; the block has three bridges
        fam(
            "W",
            over(&[(2, 3), (4, 5), (5, 7)], |(a, b)| {
                format!("<342||3424|000||1{a}1{b}>")
            }),
        ),
        fam("X", one("<324||243|000||112>")),
        fam(
            "Y",
            over(&[1, 2, 3, 4, 5], |a| format!("<324||324|000||11{a}>")),
        ),
        fam("Z", one("<324||3424|000||1213>")),
        fam("Γ", over(&[4, 6], |a| format!("<432||324|000||11{a}>"))),
        fam("Δ", over(&[2, 6], |a| format!("<432||342|000||1{a}1>"))),
        fam(
            "Θ",
            over(&[2, 3, 5], |a| format!("<432||3424|000||1{a}1{}>", a + 1)),
        ),
        fam("Λ", one("<423||234|000||112>")),
        fam("Ξ", one("<243||243|000||111>")),
        fam("Π", over(&[1, 2], |a| format!("<234||234|000||11{a}>"))),
        fam("Σ", one("<243||234|000||112>")),
    ]
}

/// The arrows of the published transfer graph between labels.
pub fn figure_edges() -> Vec<(&'static str, &'static str)> {
    const ADJ: [(&str, &[&str]); 29] = [
        ("A", &["A", "B", "U", "V", "W"]),
        ("B", &["N"]),
        ("C", &["X", "Y", "Z"]),
        ("D", &["A", "B", "W"]),
        ("E", &["C", "D", "E", "F", "G", "H", "I", "Δ", "Θ"]),
        ("F", &["J", "K", "L", "M"]),
        ("G", &["N"]),
        ("H", &["D", "H", "P", "Q", "S"]),
        ("I", &["T"]),
        ("J", &["Y", "Z"]),
        ("K", &["J", "K", "L", "M"]),
        ("L", &["N"]),
        ("M", &["T"]),
        ("N", &["N"]),
        ("O", &["A", "B", "W"]),
        ("P", &["N"]),
        ("R", &["O", "P", "R", "S"]),
        ("S", &["T"]),
        ("T", &["N"]),
        ("U", &["Λ"]),
        ("X", &["Ξ"]),
        ("Y", &["Y", "Z"]),
        ("Z", &["N"]),
        ("Γ", &["Y"]),
        ("Δ", &["A"]),
        ("Λ", &["Π"]),
        ("Ξ", &["Ξ", "Σ"]),
        ("Π", &["Π"]),
        ("Σ", &["Π"]),
    ];
    ADJ.iter()
        .flat_map(|(from, tos)| tos.iter().map(move |to| (*from, *to)))
        .collect()
}
