//! Hand-iterated paper-literal steps, tabulated with 50-digit arithmetic
//! (dt = 1 h, C = 0.9, mu = 1/72, l1 = l2 = 3.3e-6, l3 = l4 = 1e-6) and rounded to f64.

#![allow(clippy::excessive_precision)]

/// Start at state 1 with probability 1.
pub const FROM_STATE1: [[f64; 7]; 3] = [
    [0.99999703, 0.0, 0.0, 0.0, 0.0, 0.0, 3.3e-7],
    [0.9999940600088209, 0.0, 0.0, 0.0, 0.0, 0.0, 6.599990199e-7],
    [0.9999910900264626738, 0.0, 0.0, 0.0, 0.0, 0.0, 9.89997059702910897e-7],
];

/// `1 - sum(P)` after each of the steps above.
pub const FROM_STATE1_DEFECTS: [f64; 3] = [2.64e-6, 5.2799921592e-6, 7.919976477623287176e-6];

pub const SPREAD_START: [f64; 7] = [0.4, 0.2, 0.1, 0.15, 0.1, 0.03, 0.02];

pub const FROM_SPREAD: [[f64; 7]; 3] = [
    [
        0.40277658977777777778,
        0.20027718377777777778,
        0.097500297,
        0.15138861888888888889,
        0.09875009,
        0.030000477,
        0.020000281,
    ],
    [
        0.40555702108377527358,
        0.20048146574065306889,
        0.09506309482235373,
        0.15275987541715266667,
        0.097515808624352,
        0.03000094432604409,
        0.020000562210585061111,
    ],
    [
        0.40834028138137616961,
        0.20061549351178481495,
        0.092686830544356514099,
        0.15411398668027069357,
        0.096296960455867827041,
        0.030001402191891236224,
        0.02000084362924381285,
    ],
];

pub const FROM_SPREAD_DEFECTS: [f64; 3] = [
    -0.00069353744444444444444,
    -0.0013787722249158902469,
    -0.0020557983947910683524,
];
