#![allow(dead_code)]

use num_complex::Complex64 as C;
use qstab_core::code::{generate, parse_code};
use qstab_core::hardware::{make_linear, Hardware, TimingModel};
use qstab_core::{Ion, Mapping, StabilizerCode};

pub const SUITE: [&str; 9] = [
    "repetition:3",
    "repetition:5",
    "repetition:7",
    "repetition:9",
    "surface:3",
    "surface:5",
    "surface:7",
    "color:3",
    "color:5",
];

pub fn suite_codes() -> Vec<(&'static str, StabilizerCode)> {
    SUITE.iter().map(|&s| (s, generate(s).unwrap())).collect()
}

pub fn linear(traps: usize, capacity: usize) -> Hardware {
    Hardware::new(make_linear(traps, capacity).unwrap(), TimingModel::default()).unwrap()
}

/// Two traps, two checks that each reach one data qubit held by the other trap.
/// Both ancillas sit at the head of their chain and the foreign data at the tail.
pub fn pulling_instance() -> (StabilizerCode, Hardware, Mapping) {
    let code = parse_code("n=4\nZ0 Z1 Z3\nZ2 Z3 Z1\n").unwrap();
    let (a, d) = (Ion::Ancilla, Ion::Data);
    let mapping = Mapping::from_chains(
        vec![5, 5],
        vec![vec![a(0), d(0), d(1)], vec![a(1), d(2), d(3)]],
        4,
        2,
    )
    .unwrap();
    (code, linear(2, 5), mapping)
}

/// One ancilla and two checks whose listed gate order alternates between two traps.
pub fn reorder_instance() -> (StabilizerCode, Hardware, Mapping) {
    // Trap 0 holds d1, d3 and the ancilla; trap 1 holds d0, d2, d4.
    let code = parse_code("n=5\nZ0 Z1 Z2\nZ3 Z4\n").unwrap();
    let (a, d) = (Ion::Ancilla, Ion::Data);
    let mapping = Mapping::from_chains(
        vec![5, 5],
        vec![vec![d(1), d(3), a(0)], vec![d(0), d(2), d(4)]],
        5,
        1,
    )
    .unwrap();
    (code, linear(2, 5), mapping)
}

type M2 = [[C; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn dagger(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn add(a: &M2, b: &M2, s: f64) -> M2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += b[i][j] * s;
        }
    }
    out
}

fn lindblad(rho: &M2, ops: &[M2]) -> M2 {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for l in ops {
        let ld = dagger(l);
        let ldl = mul(&ld, l);
        out = add(&out, &mul(&mul(l, rho), &ld), 1.0);
        out = add(&out, &mul(&ldl, rho), -0.5);
        out = add(&out, &mul(rho, &ldl), -0.5);
    }
    out
}

/// Pauli-twirled idle channel from RK4 integration of the amplitude-damping plus
/// pure-dephasing master equation, read off the Pauli transfer diagonal.
///
/// Integrates the defect `D = sigma - E_t(sigma)`, so `1 - lambda` is formed without cancellation.
pub fn lindblad_pta(t: f64, t1: f64, t2: f64, steps: usize) -> (f64, f64, f64) {
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    let lower: M2 = [[z, one * (1.0 / t1).sqrt()], [z, z]];
    let gamma_phi = 1.0 / t2 - 1.0 / (2.0 * t1);
    let k = (gamma_phi / 2.0).max(0.0).sqrt();
    let dephase: M2 = [[one * k, z], [z, -one * k]];
    let ops = [lower, dephase];
    let paulis: [M2; 3] = [[[z, one], [one, z]], [[z, -i], [i, z]], [[one, z], [z, -one]]];
    let h = t / steps as f64;
    let mut defect = [0.0; 3];
    for (n, sigma) in paulis.iter().enumerate() {
        let drive = lindblad(sigma, &ops);
        let f = |d: &M2| add(&lindblad(d, &ops), &drive, -1.0);
        let mut d = [[z; 2]; 2];
        for _ in 0..steps {
            let k1 = f(&d);
            let k2 = f(&add(&d, &k1, h / 2.0));
            let k3 = f(&add(&d, &k2, h / 2.0));
            let k4 = f(&add(&d, &k3, h));
            let mut next = add(&d, &k1, h / 6.0);
            next = add(&next, &k2, h / 3.0);
            next = add(&next, &k3, h / 3.0);
            d = add(&next, &k4, h / 6.0);
        }
        let prod = mul(sigma, &d);
        defect[n] = ((prod[0][0] + prod[1][1]) / 2.0).re;
    }
    let [dx, dy, dz] = defect;
    ((dy + dz - dx) / 4.0, (dx + dz - dy) / 4.0, (dx + dy - dz) / 4.0)
}
