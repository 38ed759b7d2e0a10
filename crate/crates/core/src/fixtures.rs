//! Hand-built example graphs: the three sentences used throughout the docs
//! and tests, plus their linkage and implicit-unit variants.

use crate::graph::{build, Graph, Token};
use crate::label::Label::{self, *};

fn tokens(forms: &[&str]) -> Vec<Token> {
    forms.iter().map(|f| Token::bare(f)).collect()
}

const GRADUATION: &[(u32, u32, Label, bool)] = &[
    (0, 1, L, false),
    (0, 8, H, false),
    (0, 3, U, false),
    (0, 9, H, false),
    (8, 2, P, false),
    (8, 4, A, true),
    (9, 4, A, false),
    (9, 5, P, false),
    (9, 10, A, false),
    (10, 6, R, false),
    (10, 7, C, false),
];

/// "After graduation, John moved to Paris" — a remote A edge from the
/// graduation scene to John.
pub fn graduation() -> Graph {
    build(
        "graduation",
        tokens(&["After", "graduation", ",", "John", "moved", "to", "Paris"]),
        GRADUATION,
    )
}

/// The same sentence with its linkage node (id 11) still attached.
pub fn graduation_linkage() -> Graph {
    let mut edges = GRADUATION.to_vec();
    edges.extend([(11, 1, LR, false), (11, 8, LA, false), (11, 9, LA, false)]);
    build("graduation", graduation().tokens, &edges)
}

/// "John gave everything up" — the discontinuous unit "gave ... up".
pub fn gave_up() -> Graph {
    build(
        "gave_up",
        tokens(&["John", "gave", "everything", "up"]),
        &[
            (0, 1, A, false),
            (0, 5, P, false),
            (5, 2, C, false),
            (5, 4, C, false),
            (0, 3, A, false),
        ],
    )
}

/// "John and Mary 's trip home" — a coordinated participant.
pub fn john_mary() -> Graph {
    build(
        "john_mary",
        tokens(&["John", "and", "Mary", "'s", "trip", "home"]),
        &[
            (0, 7, A, false),
            (7, 1, C, false),
            (7, 2, N, false),
            (7, 3, C, false),
            (7, 4, F, false),
            (0, 5, P, false),
            (0, 6, A, false),
        ],
    )
}

pub fn figure1() -> Vec<Graph> {
    vec![graduation(), gave_up(), john_mary()]
}

/// Node id of the implicit participant in [`implicit_example`].
pub const IMPLICIT_NODE: u32 = 22;

/// "A similar technique is almost impossible to apply to other crops, such
/// as cotton, soybeans and rice." with an implicit agent of "apply".
pub fn implicit_example() -> Graph {
    build(
        "implicit",
        tokens(&[
            "A",
            "similar",
            "technique",
            "is",
            "almost",
            "impossible",
            "to",
            "apply",
            "to",
            "other",
            "crops",
            ",",
            "such as",
            "cotton",
            ",",
            "soybeans",
            "and",
            "rice",
            ".",
        ]),
        &[
            (0, 20, A, false),
            (0, 4, F, false),
            (0, 21, D, false),
            (0, IMPLICIT_NODE, A, false),
            (0, 7, F, false),
            (0, 8, P, false),
            (0, 23, A, false),
            (0, 19, U, false),
            (20, 1, E, false),
            (20, 2, E, false),
            (20, 3, C, false),
            (21, 5, E, false),
            (21, 6, C, false),
            (23, 9, R, false),
            (23, 10, E, false),
            (23, 11, C, false),
            (23, 12, U, false),
            (23, 24, E, false),
            (24, 13, R, false),
            (24, 14, C, false),
            (24, 15, U, false),
            (24, 16, C, false),
            (24, 17, N, false),
            (24, 18, C, false),
        ],
    )
}
