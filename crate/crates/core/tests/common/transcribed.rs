//! Words transcribed from the source text, in the atlas's curve names
//! (`sigma_k` for σ_k, a trailing `'` for an overline). Definition names
//! follow the shipped scripts; each definition is given by its expansion
//! exactly as printed.

/// A final word together with the printed expansions of its definitions.
pub struct Final {
    pub script: &'static str,
    pub word: &'static str,
    pub defs: &'static [(&'static str, &'static str)],
}

const X: &str = "b2 a2 b1 a1^2 b1 a2 b2";
const TILDE: &str = "a1' a2' b1 a1 a2";

/// Final lines of the eight derivations (n = 1..8).
pub fn finals() -> Vec<Final> {
    let x = |s: &str| -> &'static str { Box::leak(s.replace('X', X).into_boxed_str()) };
    vec![
        Final { script: "s4_1", word: x("(a3 a4 X)^2"), defs: &[] },
        Final { script: "s4_2", word: x("X a3 a4 (X) sigma a5"), defs: &[] },
        Final {
            script: "s4_3",
            word: "a3 b1 (a1 a2 a3 b1)^2 a3 beta a3 b2 a4 a5 a3 b2 sigma a6",
            defs: &[("beta", "a5' a4' b2 a4 a5")],
        },
        Final {
            script: "s4_4",
            word: "a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7 a3 b2 (a5 a4 a3 b2) a3 beta2 sigma a6",
            defs: &[("beta1", "a1' a2' b1 a2 a1"), ("beta2", "a5 a4 b2 a4' a5'")],
        },
        Final {
            script: "s4_5",
            word: "a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7 a3 beta3 (a8 a3 b2) a3 beta2 sigma2 sigma a6",
            defs: &[("beta1", "a1' a2' b1 a1 a2"), ("beta2", "a8 a4 b2 a4' a8'"), ("beta3", "a4' b2 a4")],
        },
        Final {
            script: "s4_6",
            word: "a3 beta1 a3 b1 a2 a1 a3 b1 sigma1 a7 a3 beta3 beta4 a3 b2 beta2 sigma3 sigma2 sigma a6",
            // β2 as carried over from the five-hole relation.
            defs: &[
                ("beta1", "a1' a2' b1 a2 a1"),
                ("beta2", "a9 a4 b2 a4' a9'"),
                ("beta3", "a4' b2 a4"),
                ("beta4", "b2' a9 b2"),
            ],
        },
        Final {
            script: "s5_7",
            word: "a3 a9 beta_t1 beta_t2 beta5 sigma3 sigma6 a5 beta3 sigma4 a3 beta_t a3 b1 (a1 a2 a3 b1) sigma a7",
            defs: &[
                ("beta_t1", "a10' b2 a10"),
                ("beta_t2", "a10' sigma5 a10"),
                ("beta5", "a6 b2 a6'"),
                ("beta3", "a3 b2 a3'"),
                ("beta_t", TILDE),
            ],
        },
        Final {
            script: "s5_8",
            word: "a10 beta_t1 beta_t2 beta1 sigma3 sigma6 a8 beta6 sigma4 sigma7 a3 beta_t a3 b1 (a1 a2 a3 b1) sigma a7",
            // The printed β̃1 reads `a11' β2 a11`; the derivation line above it
            // conjugates b2.
            defs: &[
                ("beta_t1", "a11' b2 a11"),
                ("beta_t2", "a11' sigma5 a11"),
                ("beta1", "a5 b2 a5'"),
                ("beta6", "a3 b2 a3'"),
                ("beta_t", TILDE),
            ],
        },
    ]
}

/// Relation instances quoted in the text: (relation id, lhs, rhs).
pub const RELATIONS: &[(&str, &str, &str)] = &[
    ("S0_4.lantern", "d1 d2 d3 d4", "gamma sigma alpha"),
    ("S1_3.star", "d1 d2 d3", "(a1 a2 a3 b)^3"),
    ("S1_2.chain3", "d1 d2", "(c1 b c2)^4"),
    ("S2.hyperelliptic", "", "(c1 c2 c3 c4 c5^2 c4 c3 c2 c1)^2"),
    ("S2_1.chain4", "d1", "(a1 b1 a2 b2)^10"),
    ("S2_1.two_holed_torus", "a3 a4", "(a1 b1 a2)^4"),
    ("S2_2.lantern", "a3 a4 d1 d2", "gamma sigma a5"),
    ("S2_3.star_gamma", "gamma a1 a2", "(a4 a5 a3 b2)^3"),
    ("S2_3.star_d3", "d3 a4 a5", "(a1 a2 a3 b1)^3"),
    ("S2_7.holed_torus", "a1 a2 d1 d2 d5 d6 d7", "a3 a4 a9 b2 sigma5 a10 beta5 sigma3 sigma6 a5 beta3 sigma4"),
    ("S2_7.lantern", "a1 a2 d3 d4", "gamma sigma a7"),
    ("S2_7.star", "a4 a10 gamma", "(a1 a2 a3 b1)^3"),
    ("S2_8.holed_torus", "a1 a2 d1 d2 d5 d6 d7 d8", "a10 b2 sigma5 a11 beta1 sigma3 sigma6 a8 beta6 sigma4 sigma7 a4"),
    ("S2_8.lantern", "a1 a2 d3 d4", "gamma sigma a7"),
    ("S2_8.star", "a4 a11 gamma", "(a1 a2 a3 b1)^3"),
];

/// The compressed identity used twice in the n = 1 derivation.
pub const HALF_FROM: &str = "(a1 b1 a2 b2)^5";
pub const HALF_TO: &str = "(a1 b1 a2)^4 b2 a2 b1 a1^2 b1 a2 b2";

