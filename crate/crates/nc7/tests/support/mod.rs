//! Shared reference data for the integration tests: the displayed hauptmodul
//! coefficient tables, the weight-2 Eisenstein coefficient tables, and the
//! factored form of the G1 hauptmodul rows.

use std::str::FromStr;

use nc7::exactfield::{FieldElement, Rational};
use nc7::hauptmodul::solve_hauptmodul;
use nc7::permgroup::{Family, GroupId};
use num_bigint::BigInt;

pub fn gid(f: Family, i: u8) -> GroupId {
    GroupId::new(f, i)
}

/// Parse "num" or "num/den" (arbitrary size) into a rational field element.
pub fn q(s: &str) -> FieldElement {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    FieldElement::from_rational(Rational::new(
        BigInt::from_str(num).unwrap(),
        BigInt::from_str(den).unwrap(),
    ))
}

/// Parse "a" and "b" into a + b*zeta3.
pub fn z3(a: &str, b: &str) -> FieldElement {
    let ra = q(a);
    let rb = q(b);
    FieldElement::zeta3_linear(ra.coord_a().clone(), rb.coord_a().clone())
}

/// Equality on values, ignoring the Q vs Q(zeta3) tag of rational elements.
pub fn fe_eq(x: &FieldElement, y: &FieldElement) -> bool {
    x.coord_a() == y.coord_a() && x.coord_b() == y.coord_b()
}

/// The displayed factorizations a_n/u^{n+1} of the G1 hauptmodul rows,
/// n = 1..=11, as (sign, list of (prime, exponent)). The printed row for
/// n = 6 contains an empty factor slot between 3 and 5273; the listed
/// factors already multiply to the solved coefficient, so the slot is a
/// typesetting artifact rather than a missing prime.
pub const G1_FACTORED: [(i64, &[(i64, u32)]); 11] = [
    (1, &[(2, 2), (3, 1), (7, 1), (173, 1)]),
    (1, &[(2, 11), (7, 1), (43, 1)]),
    (-1, &[(2, 1), (3, 1), (7, 1), (173, 1), (199, 1)]),
    (-1, &[(2, 14), (3, 9), (7, 1)]),
    (-1, &[(2, 3), (7, 1), (17, 1), (89, 1), (1969543, 1)]),
    (-1, &[(2, 13), (3, 1), (5273, 1), (47339, 1)]),
    (1, &[(3, 2), (7, 1), (11, 1), (19, 1), (26353729, 1)]),
    (1, &[(2, 17), (3, 10), (7, 1), (31, 1), (67, 1), (131, 1)]),
    (1, &[(2, 2), (3, 1), (7, 1), (11869625271733553, 1)]),
    (1, &[(2, 12), (3, 1), (7, 1), (17, 1), (1579, 1), (36677, 1), (385321, 1)]),
    (1, &[(2, 1), (3, 1), (7, 2), (7204271, 1), (2154711443, 1)]),
];

/// Displayed hauptmodul coefficients a_n/u^{n+1} for n = 1..=11 of the
/// rational-coefficient groups, as written (numerators over powers of 2).
pub fn haupt_rational_rows(group: &str) -> Vec<&'static str> {
    match group {
        "G3" => vec![
            "148932",
            "-71333864/2",
            "14784602112/2",
            "-2720037481056/2",
            "926140535244764/4",
            "-147594381291749376/4",
            "22341564325891713168/4",
            "-6482694981105850075968/8",
            "907550467150406926565376/8",
            "-123344662799290912907945472/8",
            "32655462531659638680360877638/16",
        ],
        "H1" => vec![
            "1946",
            "17780",
            "813295",
            "-20472508",
            "-194969600",
            "-21590535732",
            "-86533770365",
            "-5540827925500",
            "121544077700080",
            "954435095756800",
            "97227702559110739",
        ],
        "H3" => vec![
            "7583156",
            "-8915200000",
            "25855539541090",
            "-38753899878400000",
            "59853295754680171800",
            "-107814623754600729600000",
            "130691527974826975392903135",
            "-229196454200112641389772800000",
            "294346563065808045129145192319236",
            "-427644716636763893188085418688000000",
            "606586125578466006634487839969153168734",
        ],
        other => panic!("no rational table for {other}"),
    }
}

/// Displayed hauptmodul coefficients for the Q(zeta3) groups: (a, b) with
/// the value a + b*zeta3, n starting at 1.
pub fn haupt_zeta3_rows(group: &str) -> Vec<(&'static str, &'static str)> {
    match group {
        "U1" => vec![
            ("4", "20"),
            ("12", "60"),
            ("48", "-96"),
            ("288", "432"),
            ("-1060/9", "-3893/9"),
            ("-576", "576"),
            ("7372", "13952/3"),
            ("18312", "7168"),
            ("-33568", "-45200"),
            ("93248", "-4160"),
            ("-22548985/216", "-3412747/72"),
        ],
        "U6" => vec![
            ("4653180", "3195612"),
            ("7901431808", "2113007616"),
            ("-11584189398816", "-5777884753902"),
            ("3027156411138048", "3171254057975808"),
            ("-3800819906733485320", "-20391915647836108224"),
            ("-10803276590128984571904", "15478255418070783762432"),
            ("24908794926096718823786001", "26591161128955478844327729"),
            (
                "-12727797977727574691751002112",
                "-26181911558676353382430801920",
            ),
            (
                "-15929436789742692451659751424160",
                "26604087748477982557834447865556",
            ),
        ],
        other => panic!("no zeta3 table for {other}"),
    }
}

/// Displayed weight-2 coefficients a_n/u^n, n = 0..=10, rational groups.
pub fn g2_rational_rows(group: &str) -> Vec<&'static str> {
    match group {
        "G1" => vec![
            "1",
            "-168",
            "-840",
            "733152",
            "-1615656",
            "1179184272",
            "-5780133408",
            "-1097701319232",
            "20620554819480",
            "-1310614136578824",
            "-14959868841286320",
        ],
        "G3" => vec![
            "1",
            "462",
            "-84420",
            "-807828",
            "-891458736",
            "82305718992",
            "5155138704870",
            "807981764899218",
            "-57396539567144736",
            "829520378016134700",
            "-368800915551641445600",
        ],
        "H1" => vec![
            "1",
            "-28",
            "-3108",
            "88172",
            "824012",
            "-14260008",
            "352362948",
            "13569079384",
            "-195382795860",
            "-1200557668744",
            "18866241755032",
        ],
        "H3" => vec![
            "1",
            "952",
            "-14260008",
            "5950907872",
            "18866241755032",
            "14858201843068752",
            "-29392973490650091168",
            "18769317912571342452672",
            "26663537479505346618394392",
            "12713310504973377181575454552",
            "-36194240778558471635244990599408",
        ],
        other => panic!("no rational g2 table for {other}"),
    }
}

/// Displayed weight-2 coefficients a_n/u^n for the Q(zeta3) groups,
/// n = 0..=10, as (a, b) with the value a + b*zeta3.
pub fn g2_zeta3_rows(group: &str) -> Vec<(&'static str, &'static str)> {
    match group {
        "U1" => vec![
            ("1", "0"),
            ("10", "8"),
            ("28", "56"),
            ("-84", "84"),
            ("-336", "0"),
            ("-1008", "-1008"),
            ("-184/3", "-710/3"),
            ("9088/3", "-9566/3"),
            ("30016/3", "4256"),
            ("19404", "15624"),
            ("-25984/3", "139552/3"),
        ],
        "U6" => vec![
            ("1", "0"),
            ("4944", "1368"),
            ("13265352", "5264136"),
            ("16044542112", "12839470272"),
            ("27018559576704", "22545390152664"),
            ("9649676839772016", "9748947084182352"),
            ("16480296599809346784", "34718972026438197504"),
            ("9122178274543742453376", "9778372812649484494272"),
            (
                "3599167618394097606994536",
                "35207674866620513785843560",
            ),
            (
                "-1534671671263749769838754840",
                "35212791025867821428233261296",
            ),
            (
                "-8424036363723923387197847067264",
                "19858438209488318852697458205264",
            ),
        ],
        other => panic!("no zeta3 g2 table for {other}"),
    }
}

/// Check every displayed hauptmodul row against the solver, exactly.
pub fn check_hauptmodul_tables() {
    // G1 via the displayed factorizations
    let z = solve_hauptmodul(gid(Family::G, 1), 11).unwrap();
    assert!(fe_eq(&z.coeff(-1), &q("1")));
    assert!(fe_eq(&z.coeff(0), &q("0")));
    for (n, (sign, factors)) in (1i64..).zip(G1_FACTORED.iter()) {
        let mut v = BigInt::from(*sign);
        for &(p, e) in *factors {
            v *= BigInt::from(p).pow(e);
        }
        let expect = FieldElement::from_rational(Rational::from_integer(v));
        assert!(
            fe_eq(&z.coeff(n), &expect),
            "G1 row {n}: solved {} vs displayed product {}",
            z.coeff(n),
            expect
        );
    }

    for (fam, idx, name) in [
        (Family::G, 3, "G3"),
        (Family::H, 1, "H1"),
        (Family::H, 3, "H3"),
    ] {
        let z = solve_hauptmodul(gid(fam, idx), 11).unwrap();
        assert!(fe_eq(&z.coeff(-1), &q("1")));
        assert!(fe_eq(&z.coeff(0), &q("0")));
        for (n, row) in (1i64..).zip(haupt_rational_rows(name)) {
            assert!(
                fe_eq(&z.coeff(n), &q(row)),
                "{name} row {n}: solved {} vs displayed {row}",
                z.coeff(n)
            );
        }
    }

    for (idx, name) in [(1u8, "U1"), (6, "U6")] {
        let rows = haupt_zeta3_rows(name);
        let order = rows.len() as i64;
        let z = solve_hauptmodul(gid(Family::U, idx), order).unwrap();
        assert!(fe_eq(&z.coeff(-1), &q("1")));
        assert!(fe_eq(&z.coeff(0), &q("0")));
        for (n, (a, b)) in (1i64..).zip(rows.iter()) {
            assert!(
                fe_eq(&z.coeff(n), &z3(a, b)),
                "{name} row {n}: solved {} vs displayed {a} + ({b})*z3",
                z.coeff(n)
            );
        }
        // The V-family solution is the Galois conjugate of the U-family one.
        let v = solve_hauptmodul(gid(Family::V, idx), order).unwrap();
        for n in -1..=order {
            assert!(
                fe_eq(&v.coeff(n), &z.coeff(n).conjugate()),
                "V{idx} row {n} is not the conjugate of U{idx}"
            );
        }
    }
}

/// Check every displayed weight-2 row against the exact series, exactly.
pub fn check_g2_tables() {
    for (fam, idx, name) in [
        (Family::G, 1, "G1"),
        (Family::G, 3, "G3"),
        (Family::H, 1, "H1"),
        (Family::H, 3, "H3"),
    ] {
        let s = nc7::eisenstein::g2_exact(gid(fam, idx), 10).unwrap();
        for (n, row) in (0i64..).zip(g2_rational_rows(name)) {
            assert!(
                fe_eq(&s.coeff(n), &q(row)),
                "{name} g2 row {n}: computed {} vs displayed {row}",
                s.coeff(n)
            );
        }
    }
    for (idx, name) in [(1u8, "U1"), (6, "U6")] {
        let s = nc7::eisenstein::g2_exact(gid(Family::U, idx), 10).unwrap();
        for (n, (a, b)) in (0i64..).zip(g2_zeta3_rows(name).iter()) {
            assert!(
                fe_eq(&s.coeff(n), &z3(a, b)),
                "{name} g2 row {n}: computed {} vs displayed {a} + ({b})*z3",
                s.coeff(n)
            );
        }
        let v = nc7::eisenstein::g2_exact(gid(Family::V, idx), 10).unwrap();
        for n in 0..=10 {
            assert!(
                fe_eq(&v.coeff(n), &s.coeff(n).conjugate()),
                "V{idx} g2 row {n} is not the conjugate of U{idx}"
            );
        }
    }
}
