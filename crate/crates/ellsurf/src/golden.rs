//! Embedded classification tables and the harness that regenerates and
//! re-analyzes a representative for every row.

use serde::Serialize;
use thiserror::Error;

use crate::families::{generate, FamilyKind, FamilySpec};
use crate::frobext::{frobenius_pullback, igusa_table};
use crate::lattice::{mw_rank, narrow_index, parse_lattice, Lattice};
use crate::parallel::{map_collect, Execution};
use crate::sections::{check_fixed_fiber_bound, fixed_locus, FixedLocusDescriptor, Specialization};
use crate::tate::{analyze, AnalyzeOptions, HeightFlag, ReductionClass, SurfaceReport};
use crate::weierstrass::WeierstrassModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoldenError {
    #[error("unknown table '{0}'; available: igusa, char7, char5, char3, char2, order8, order4")]
    UnknownTable(String),
}

/// Identifiers of the embedded tables, in verification order.
pub const TABLE_IDS: [&str; 7] = ["igusa", "char7", "char5", "char3", "char2", "order8", "order4"];

/// Expected formal Brauer height information of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedHeight {
    /// `h = 1`, not supersingular.
    One,
    /// `h >= 2` without supersingularity being asserted.
    AtLeastTwo,
    /// `h = infinity`: supersingular.
    Supersingular,
}

/// How a row's surface is produced.
#[derive(Clone, Debug)]
pub enum Representative {
    Equation {
        p: u32,
        a: [&'static str; 5],
    },
    Family {
        kind: FamilyKind,
        parameters: &'static [(&'static str, &'static str)],
    },
    /// A prebuilt model (used for the Igusa towers).
    Model(WeierstrassModel),
    /// No model over the prime field exists.
    Unrealizable(&'static str),
}

impl Representative {
    pub fn build(&self) -> Result<Option<WeierstrassModel>, crate::Error> {
        match self {
            Representative::Equation { p, a } => Ok(Some(WeierstrassModel::from_strs(*p, *a)?)),
            Representative::Family { kind, parameters } => {
                let spec = parameters.iter().fold(FamilySpec::new(*kind), |s, (k, v)| s.with(k, v));
                Ok(Some(generate(&spec, false)?))
            }
            Representative::Model(m) => Ok(Some(m.clone())),
            Representative::Unrealizable(_) => Ok(None),
        }
    }
}

/// One transcribed table row.
#[derive(Clone, Debug)]
pub struct GoldenRow {
    pub representative: Representative,
    /// Fiber types with multiplicities over the algebraic closure.
    pub fibers: Vec<(&'static str, usize)>,
    /// Declared torsion order `p^n` used for the supersingularity decision.
    pub torsion: Option<u32>,
    pub height: Option<ExpectedHeight>,
    pub sigma0: Option<u32>,
    /// Narrow Mordell-Weil lattice.
    pub narrow_mw: Option<&'static str>,
    /// Free part of the Mordell-Weil group.
    pub mw_free: Option<&'static str>,
    /// Order of the torsion subgroup of the Mordell-Weil group.
    pub mw_torsion: Option<u64>,
    /// Index of a row whose fibers the Frobenius pullback of this row must reproduce.
    pub pullback_is: Option<usize>,
}

impl GoldenRow {
    fn new(representative: Representative, fibers: &[(&'static str, usize)]) -> Self {
        GoldenRow {
            representative,
            fibers: fibers.to_vec(),
            torsion: None,
            height: None,
            sigma0: None,
            narrow_mw: None,
            mw_free: None,
            mw_torsion: None,
            pullback_is: None,
        }
    }

    fn torsion(mut self, n: u32) -> Self {
        self.torsion = Some(n);
        self
    }

    fn height(mut self, h: ExpectedHeight) -> Self {
        self.height = Some(h);
        self
    }

    fn mw(mut self, sigma0: u32, narrow: &'static str, free: &'static str, torsion: u64) -> Self {
        self.sigma0 = Some(sigma0);
        self.narrow_mw = Some(narrow);
        self.mw_free = Some(free);
        self.mw_torsion = Some(torsion);
        self.height = Some(ExpectedHeight::Supersingular);
        self
    }

    fn pullback_is(mut self, row: usize) -> Self {
        self.pullback_is = Some(row);
        self
    }

    /// Sorted expected multiset of fiber type strings.
    pub fn expected_fibers(&self) -> Vec<String> {
        let mut v: Vec<String> = self.fibers.iter().flat_map(|(s, n)| std::iter::repeat_n(s.to_string(), *n)).collect();
        v.sort();
        v
    }

    /// Human-readable row label, e.g. `II_4, 6xI_3`.
    pub fn label(&self) -> String {
        self.fibers
            .iter()
            .map(|(s, n)| if *n == 1 { s.to_string() } else { format!("{n}x{s}") })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

#[derive(Clone, Debug)]
pub struct GoldenTable {
    pub id: &'static str,
    pub title: &'static str,
    pub p: u32,
    pub rows: Vec<GoldenRow>,
}

fn eq(p: u32, a: [&'static str; 5]) -> Representative {
    Representative::Equation { p, a }
}

fn fam(kind: FamilyKind, parameters: &'static [(&'static str, &'static str)]) -> Representative {
    Representative::Family { kind, parameters }
}

macro_rules! base_change {
    ($p_power:literal, $pullbacks:literal, $phi:literal) => {
        fam(
            FamilyKind::IgusaBaseChange,
            &[("p_power", stringify!($p_power)), ("pullbacks", stringify!($pullbacks)), ("phi", $phi)],
        )
    };
}

fn igusa() -> GoldenTable {
    let rows = igusa_table()
        .into_iter()
        .flat_map(|entry| {
            entry.tower.into_iter().map(|row| {
                let fibers: Vec<(&'static str, usize)> =
                    row.expected_fibers.iter().map(|s| (&*Box::leak(s.clone().into_boxed_str()), 1usize)).collect();
                GoldenRow::new(Representative::Model(row.model), &fibers)
            })
        })
        .collect();
    GoldenTable {
        id: "igusa",
        title: "Universal curves over rational Igusa curves and their Frobenius towers",
        p: 0,
        rows,
    }
}

fn char7() -> GoldenTable {
    GoldenTable {
        id: "char7",
        title: "Characteristic 7, 7-torsion",
        p: 7,
        rows: vec![GoldenRow::new(eq(7, ["0", "0", "0", "t", "t^12"]), &[("III", 1), ("I_7", 3)])
            .torsion(7)
            .mw(1, "A1(7)", "A1*(7)", 7)],
    }
}

fn char5() -> GoldenTable {
    use ExpectedHeight::One;
    let ab = |params: &'static [(&'static str, &'static str)]| fam(FamilyKind::P5AlphaBeta, params);
    GoldenTable {
        id: "char5",
        title: "Characteristic 5, 5-torsion, degree 2 classifying maps",
        p: 5,
        rows: vec![
            GoldenRow::new(ab(&[("alpha", "2"), ("beta", "3")]), &[("II", 2), ("I_5", 4)]).torsion(5).height(One),
            GoldenRow::new(ab(&[("alpha", "1"), ("beta", "2")]), &[("II", 2), ("I_{10}", 1), ("I_5", 2)])
                .torsion(5)
                .height(One),
            GoldenRow::new(ab(&[("alpha", "1"), ("beta", "4")]), &[("II", 2), ("I_{10}", 2)]).torsion(5).height(One),
            GoldenRow::new(ab(&[("alpha", "0"), ("beta", "2")]), &[("IV", 1), ("I_5", 4)])
                .torsion(5)
                .mw(2, "A2(5)", "A2*(5)", 5),
            GoldenRow::new(ab(&[("alpha", "0"), ("beta", "1")]), &[("IV", 1), ("I_{10}", 1), ("I_5", 2)])
                .torsion(5)
                .mw(1, "<30>", "<5/6>", 5),
        ],
    }
}

fn char3() -> GoldenTable {
    let r = |rep, fibers: &[(&'static str, usize)], s0, narrow, free, tors| {
        GoldenRow::new(rep, fibers).torsion(3).mw(s0, narrow, free, tors)
    };
    GoldenTable {
        id: "char3",
        title: "Characteristic 3, 3-torsion, supersingular surfaces",
        p: 3,
        rows: vec![
            // degree 6, separable
            r(base_change!(3, 1, "t^6/(1+2*t+t^5)"), &[("II_4", 1), ("I_3", 6)], 6, "E8(3)", "E8(3)", 3),
            r(base_change!(3, 1, "t^6/(1+t+t^4)"), &[("II_4", 1), ("I_6", 1), ("I_3", 4)], 5, "E7(3)", "E7*(3)", 3),
            r(base_change!(3, 1, "t^6/(1+t+t^3)"), &[("II_4", 1), ("I_9", 1), ("I_3", 3)], 4, "E6(3)", "E6*(3)", 3),
            r(
                base_change!(3, 1, "t^6/(2+t+2*t^2+t^4)"),
                &[("II_4", 1), ("I_6", 2), ("I_3", 2)],
                4,
                "D6(3)",
                "D6*(3)",
                3,
            ),
            r(base_change!(3, 1, "t^6/(2+t+t^2)"), &[("II_4", 1), ("I_{12}", 1), ("I_3", 2)], 3, "D5(3)", "D5*(3)", 3),
            r(
                base_change!(3, 1, "t^6/(1+2*t+2*t^2+t^3+t^4)"),
                &[("II_4", 1), ("I_6", 3)],
                3,
                "D4(3)+A1(3)",
                "D4*(3)+A1*(3)",
                3,
            ),
            r(
                base_change!(3, 1, "t^6/(2+2*t+t^2+t^3)"),
                &[("II_4", 1), ("I_9", 1), ("I_6", 1), ("I_3", 1)],
                3,
                "A5(3)",
                "A5*(3)",
                3,
            ),
            r(base_change!(3, 1, "t^6/(1+t)"), &[("II_4", 1), ("I_{15}", 1), ("I_3", 1)], 2, "A4(3)", "A4*(3)", 3),
            r(
                base_change!(3, 1, "t^6/(1+t+t^2)"),
                &[("II_4", 1), ("I_{12}", 1), ("I_6", 1)],
                2,
                "A3(3)+A1(3)",
                "A3*(3)+A1*(3)",
                3,
            ),
            r(base_change!(3, 1, "t^6/(1+t^5)"), &[("IV_2", 1), ("I_3", 6)], 5, "E6(3)", "E6*(3)", 3),
            r(base_change!(3, 1, "t^6/(1+t^4)"), &[("IV_2", 1), ("I_6", 1), ("I_3", 4)], 4, "A5(3)", "A5*(3)", 3),
            r(
                base_change!(3, 1, "t^6/(1+2*t^2+t^3)"),
                &[("IV_2", 1), ("I_9", 1), ("I_3", 3)],
                3,
                "A2(3)^2",
                "A2*(3)^2",
                3,
            ),
            r(
                base_change!(3, 1, "t^6/(1+2*t^2+t^3+2*t^4)"),
                &[("IV_2", 1), ("I_6", 2), ("I_3", 2)],
                3,
                "L4(3)",
                "L4*(3)",
                3,
            ),
            r(base_change!(3, 1, "t^6/(1+2*t^2)"), &[("IV_2", 1), ("I_{12}", 1), ("I_3", 2)], 2, "L3(3)", "L3*(3)", 3),
            r(
                base_change!(3, 1, "t^6/(1+2*t^2+t^4)"),
                &[("IV_2", 1), ("I_6", 3)],
                2,
                "A1(3)+L2(3)",
                "A1*(3)+L2*(3)",
                3,
            ),
            r(base_change!(3, 1, "t^6/(1+t^2+t^5)"), &[("I*_{0,0}", 1), ("I_3", 6)], 4, "D4(3)", "D4*(3)", 3),
            r(
                base_change!(3, 1, "t^6/(2+t^2+t^4)"),
                &[("I*_{0,0}", 1), ("I_6", 1), ("I_3", 4)],
                3,
                "A1(3)^3",
                "A1*(3)^3",
                3,
            ),
            r(
                base_change!(3, 1, "t^6/(2+t^2+t^3+t^4)"),
                &[("I*_{0,0}", 1), ("I_6", 2), ("I_3", 2)],
                2,
                "A1(3)^2",
                "A1*(3)^2",
                6,
            ),
            r(
                base_change!(3, 1, "t^6/(1+t^2+t^3)"),
                &[("I*_{0,0}", 1), ("I_9", 1), ("I_3", 3)],
                2,
                "L2(3)",
                "L2*(3)",
                3,
            ),
            r(base_change!(3, 1, "t^6/(1+t^2+t^4)"), &[("I*_{0,0}", 1), ("I_6", 3)], 1, "A1(3)", "A1*(3)", 12),
            r(base_change!(3, 1, "t^6/(1+t^2)"), &[("I*_{0,0}", 1), ("I_{12}", 1), ("I_3", 2)], 1, "<12>", "<3/4>", 6),
            // degree 6, inseparable
            r(base_change!(3, 1, "t^6/(1+t^3)"), &[("IV_2", 1), ("I_9", 2)], 2, "A2(3)", "A2*(3)", 3),
            r(base_change!(3, 1, "t^6"), &[("IV_2", 1), ("I_{18}", 1)], 1, "<6>", "<3/2>", 3),
            // degree 5
            r(base_change!(3, 1, "t^5/(1+t^4)"), &[("IV_5", 1), ("I_3", 5)], 5, "E8(3)", "3.(E8(3))", 3),
            r(base_change!(3, 1, "t^5/(1+t+t^3)"), &[("IV_5", 1), ("I_6", 1), ("I_3", 3)], 4, "E7(3)", "3.(E7*(3))", 3),
            r(
                base_change!(3, 1, "t^5/(2+2*t+t^2+t^3)"),
                &[("IV_5", 1), ("I_6", 2), ("I_3", 1)],
                3,
                "D6(3)",
                "3.(D6*(3))",
                3,
            ),
            r(base_change!(3, 1, "t^5/(1+t^2)"), &[("IV_5", 1), ("I_9", 1), ("I_3", 2)], 3, "E6(3)", "3.(E6*(3))", 3),
            r(base_change!(3, 1, "t^5/(1+t+t^2)"), &[("IV_5", 1), ("I_9", 1), ("I_6", 1)], 2, "A5(3)", "3.(A5*(3))", 3),
            r(base_change!(3, 1, "t^5/(1+t)"), &[("IV_5", 1), ("I_{12}", 1), ("I_3", 1)], 2, "D5(3)", "3.(D5*(3))", 3),
            r(base_change!(3, 1, "t^5"), &[("IV_5", 1), ("I_{15}", 1)], 1, "A4(3)", "3.(A4*(3))", 3),
            // degree 4
            r(base_change!(3, 1, "t^4/(1+t+t^3)"), &[("IV*_4", 1), ("I_3", 4)], 4, "E6(3)", "E6*(3)", 3),
            r(base_change!(3, 1, "t^4/(1+t^2)"), &[("IV*_4", 1), ("I_6", 1), ("I_3", 2)], 3, "A5(3)", "A5*(3)", 3),
            r(base_change!(3, 1, "t^4/(1+t+t^2)"), &[("IV*_4", 1), ("I_6", 2)], 2, "L4(3)", "L4*(3)", 3),
            r(base_change!(3, 1, "t^4/(1+t)"), &[("IV*_4", 1), ("I_9", 1), ("I_3", 1)], 2, "A2(3)^2", "A2*(3)^2", 3),
            r(base_change!(3, 1, "t^4"), &[("IV*_4", 1), ("I_{12}", 1)], 1, "L3(3)", "L3*(3)", 3),
        ],
    }
}

fn char2() -> GoldenTable {
    use ExpectedHeight::{AtLeastTwo, One};
    let twist = |parameters| fam(FamilyKind::P2Twist, parameters);
    GoldenTable {
        id: "char2",
        title: "Characteristic 2: a 4-fold Frobenius chain, iso-trivial fibrations and a twist",
        p: 2,
        rows: vec![
            GoldenRow::new(eq(2, ["t^2", "1+t", "t^2", "0", "t"]), &[("II_6", 1), ("I_{16}", 1)])
                .torsion(2)
                .height(AtLeastTwo),
            GoldenRow::new(eq(2, ["t^2", "t", "0", "0", "t^4"]), &[("I*_{4,6}", 1), ("I_8", 1)])
                .torsion(2)
                .height(AtLeastTwo)
                .pullback_is(0),
            GoldenRow::new(eq(2, ["t^2", "t", "0", "0", "t^8"]), &[("I*_{8,6}", 1), ("I_4", 1)])
                .torsion(2)
                .height(AtLeastTwo)
                .pullback_is(1),
            GoldenRow::new(eq(2, ["t^2", "t", "0", "0", "t^10"]), &[("I*_{10,6}", 1), ("I_2", 1)])
                .torsion(2)
                .height(AtLeastTwo)
                .pullback_is(2),
            GoldenRow::new(eq(2, ["t^2", "t", "0", "0", "t^11"]), &[("I*_{11,6}", 1), ("I_1", 1)])
                .height(AtLeastTwo)
                .pullback_is(3),
            GoldenRow::new(twist(&[("base", "isotrivial"), ("g", "t+1/t")]), &[("I*_{4,2}", 2)]).torsion(2).height(One),
            GoldenRow::new(twist(&[("base", "isotrivial"), ("g", "t^3")]), &[("I*_{12,6}", 1)])
                .torsion(2)
                .height(AtLeastTwo),
            GoldenRow::new(
                twist(&[("base", "igusa4"), ("g", "1/(t+1)")]),
                &[("I_2", 1), ("III*_1", 1), ("I*_{4,2}", 1)],
            ),
        ],
    }
}

fn order8() -> GoldenTable {
    GoldenTable {
        id: "order8",
        title: "Characteristic 2, 8-torsion",
        p: 2,
        rows: vec![GoldenRow::new(eq(2, ["t^2", "0", "0", "1", "t^4"]), &[("I*_{1,1}", 1), ("I_8", 2)])
            .torsion(8)
            .mw(1, "A1(2)", "A1*(2)", 8)],
    }
}

fn order4() -> GoldenTable {
    use ExpectedHeight::One;
    let ord = |rep, fibers: &[(&'static str, usize)]| GoldenRow::new(rep, fibers).torsion(4).height(One);
    let ss = |rep, fibers: &[(&'static str, usize)], s0, narrow, free, tors| {
        GoldenRow::new(rep, fibers).torsion(4).mw(s0, narrow, free, tors)
    };
    GoldenTable {
        id: "order4",
        title: "Characteristic 2, 4-torsion, X = Y^(4)",
        p: 2,
        rows: vec![
            // degree 2
            ord(base_change!(4, 2, "t/(1+t+t^2)"), &[("I*_{1,1}", 2), ("I_4", 2)]),
            ord(base_change!(4, 2, "1/(t+t^2)"), &[("I*_{1,1}", 2), ("I_8", 1)]),
            // degree 3
            ord(base_change!(4, 2, "(1+t+t^2)/(t+t^3)"), &[("I*_{1,1}", 1), ("III_1", 1), ("I_4", 3)]),
            ord(
                Representative::Unrealizable(
                    "four singular fibers of pairwise distinct types need four rational places, but P^1(GF(2)) has three",
                ),
                &[("I*_{1,1}", 1), ("III_1", 1), ("I_8", 1), ("I_4", 1)],
            ),
            ord(base_change!(4, 2, "1/(t+t^3)"), &[("I*_{1,1}", 1), ("III_1", 1), ("I_{12}", 1)]),
            ss(base_change!(4, 2, "(1+t+t^2)/t^3"), &[("I*_{3,3}", 1), ("I_4", 3)], 3, "D4(2)", "D4*(2)", 4),
            ss(base_change!(4, 2, "t/(1+t+t^2+t^3)"), &[("I*_{3,3}", 1), ("I_8", 1), ("I_4", 1)], 2, "A3(2)", "A3*(2)", 4),
            ss(base_change!(4, 2, "1/t^3"), &[("I*_{3,3}", 1), ("I_{12}", 1)], 1, "A2(2)", "A2*(2)", 4),
            // degree 4, separable
            ord(base_change!(4, 2, "(1+t+t^3)/(t^2+t^4)"), &[("III_1", 2), ("I_4", 4)]),
            ord(base_change!(4, 2, "(t+t^2)/(1+t^2+t^4)"), &[("III_1", 2), ("I_8", 1), ("I_4", 2)]),
            ord(base_change!(4, 2, "t/(1+t^2+t^4)"), &[("III_1", 2), ("I_{12}", 1), ("I_4", 1)]),
            ss(base_change!(4, 2, "(1+t+t^3)/t^4"), &[("I*_{0,2}", 1), ("I_4", 4)], 4, "D4(2)", "D4*(2)", 4),
            ss(base_change!(4, 2, "(1+t+t^2)/t^4"), &[("I*_{0,2}", 1), ("I_8", 1), ("I_4", 2)], 3, "A3(2)", "A3*(2)", 4),
            ss(base_change!(4, 2, "t/(1+t^4)"), &[("I*_{0,2}", 1), ("I_{12}", 1), ("I_4", 1)], 2, "A2(2)", "A2*(2)", 4),
            // degree 4, inseparable but not purely inseparable
            ord(base_change!(4, 2, "t^2/(1+t^2+t^4)"), &[("III_1", 2), ("I_8", 2)]),
            ord(base_change!(4, 2, "1/(t^2+t^4)"), &[("III_1", 2), ("I_{16}", 1)]),
            ss(base_change!(4, 2, "t^2/(1+t^4)"), &[("I*_{1,1}", 1), ("I_8", 2)], 1, "A1(2)", "A1*(2)", 8),
            // degree 4, purely inseparable
            ss(base_change!(4, 2, "1/t^4"), &[("I*_{1,1}", 1), ("I_{16}", 1)], 1, "0", "0", 4),
        ],
    }
}

/// Looks up an embedded table.
pub fn table(id: &str) -> Result<GoldenTable, GoldenError> {
    Ok(match id {
        "igusa" => igusa(),
        "char7" => char7(),
        "char5" => char5(),
        "char3" => char3(),
        "char2" => char2(),
        "order8" => order8(),
        "order4" => order4(),
        _ => return Err(GoldenError::UnknownTable(id.to_string())),
    })
}

/// Free Mordell-Weil lattice and torsion order recorded for a configuration.
pub fn known_mordell_weil(p: u32, fibers: &[String]) -> Option<(Lattice, u64)> {
    ["char7", "char5", "char3", "order8", "order4"]
        .into_iter()
        .map(|id| table(id).expect("embedded table"))
        .filter(|t| t.p == p)
        .flat_map(|t| t.rows)
        .find(|row| row.mw_free.is_some() && row.expected_fibers() == fibers)
        .map(|row| {
            let free = parse_lattice(row.mw_free.expect("checked")).expect("embedded lattice parses");
            (free, row.mw_torsion.unwrap_or(1))
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Pass,
    Fail,
    /// No representative exists over the prime field; nothing was compared.
    Unrealizable,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowReport {
    pub index: usize,
    pub label: String,
    pub status: RowStatus,
    pub equation: Option<String>,
    pub expected_fibers: Vec<String>,
    pub found_fibers: Vec<String>,
    pub c2: Option<i64>,
    pub sigma0: Option<u32>,
    pub height_flag: Option<HeightFlag>,
    pub supersingular: Option<bool>,
    pub fixed_fibers: Option<usize>,
    pub diffs: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: String,
    pub title: String,
    pub rows: Vec<RowReport>,
    pub checked: usize,
    pub passed: usize,
    pub unrealizable: usize,
    pub pass: bool,
}

/// Fixed-locus descriptor of every fiber, with its place degree, under the most
/// permissive placement of a torsion section (meeting the zero section on every additive fiber).
pub fn worst_case_fixed_loci(report: &SurfaceReport) -> Result<Vec<(FixedLocusDescriptor, usize)>, crate::Error> {
    let mut descriptors = Vec::new();
    for f in &report.fibers {
        let (meets_zero, spec) = match f.reduction_class {
            ReductionClass::GoodOrdinary => (false, Specialization::Identity),
            ReductionClass::Multiplicative => (false, Specialization::Component(1)),
            _ => (true, Specialization::Identity),
        };
        descriptors.push((fixed_locus(f, report.p(), meets_zero, spec)?, f.degree()));
    }
    Ok(descriptors)
}

/// Number of fibers with a non-empty fixed locus in [`worst_case_fixed_loci`].
pub fn worst_case_fixed_fibers(report: &SurfaceReport) -> Result<usize, crate::Error> {
    Ok(check_fixed_fiber_bound(&worst_case_fixed_loci(report)?)?)
}

fn check_row(
    row: &GoldenRow,
    rows: &[GoldenRow],
    model: &WeierstrassModel,
    execution: Execution,
) -> Result<RowReport, crate::Error> {
    let opts = AnalyzeOptions { raw: false, torsion: row.torsion, assume_rho: row.sigma0.map(|_| 22), execution };
    let report = analyze(model, &opts)?;
    let mut diffs = Vec::new();
    let expected = row.expected_fibers();
    let found = report.geometric_fiber_multiset();
    if found != expected {
        diffs.push(format!("fibers: expected {expected:?}, found {found:?}"));
    }
    let euler: i64 = report.fibers.iter().map(|f| f.v_delta_min as i64 * f.degree() as i64).sum();
    if euler != 12 * report.chi as i64 {
        diffs.push(format!("Euler sum {euler} != 12 chi = {}", 12 * report.chi));
    }
    if report.c2 != 12 * report.chi as i64 {
        diffs.push(format!("c2 {} != 12 chi", report.c2));
    }
    let mut fixed_fibers = None;
    if report.chi == 2 {
        match worst_case_fixed_fibers(&report) {
            Ok(n) => fixed_fibers = Some(n),
            Err(e) => diffs.push(format!("fixed locus: {e}")),
        }
    }
    let (flag, ss) = (report.height_flag, report.supersingular);
    let expectation = match row.height {
        Some(ExpectedHeight::One) => Some(("h=1", flag == HeightFlag::One && ss != Some(true))),
        Some(ExpectedHeight::AtLeastTwo) => Some(("h>=2", flag == HeightFlag::AtLeastTwo && ss != Some(true))),
        Some(ExpectedHeight::Supersingular) => {
            Some(("supersingular", flag == HeightFlag::Infinite && ss == Some(true)))
        }
        None => None,
    };
    if let Some((want, false)) = expectation {
        diffs.push(format!("height: expected {want}, found {flag:?} / {ss:?}"));
    }
    if let Some(s0) = row.sigma0 {
        if report.sigma0 != Some(s0) {
            diffs.push(format!("sigma0: expected {s0}, found {:?}", report.sigma0));
        }
    }
    if let (Some(narrow), Some(free)) = (row.narrow_mw, row.mw_free) {
        let narrow = parse_lattice(narrow)?;
        let free = parse_lattice(free)?;
        let rank = mw_rank(22, &report.fibers)?;
        if narrow.rank() as u32 != rank {
            diffs.push(format!(
                "Mordell-Weil rank: narrow lattice has rank {}, Shioda-Tate gives {rank}",
                narrow.rank()
            ));
        }
        if narrow_index(&narrow, &free).is_none() {
            diffs.push("narrow lattice does not sit with square index in the free part".to_string());
        }
    }
    if let Some(target) = row.pullback_is {
        let pulled = analyze(&frobenius_pullback(model)?, &AnalyzeOptions { execution, ..AnalyzeOptions::default() })?;
        let want = rows[target].expected_fibers();
        if pulled.geometric_fiber_multiset() != want {
            diffs.push(format!("Frobenius pullback: expected {want:?}, found {:?}", pulled.geometric_fiber_multiset()));
        }
    }
    Ok(RowReport {
        index: 0,
        label: row.label(),
        status: if diffs.is_empty() { RowStatus::Pass } else { RowStatus::Fail },
        equation: Some(model.equation()),
        expected_fibers: expected,
        found_fibers: found,
        c2: Some(report.c2),
        sigma0: report.sigma0,
        height_flag: Some(report.height_flag),
        supersingular: report.supersingular,
        fixed_fibers,
        diffs,
    })
}

fn verify_row(index: usize, row: &GoldenRow, rows: &[GoldenRow], execution: Execution) -> RowReport {
    let failed = |diff: String, equation: Option<String>| RowReport {
        index,
        label: row.label(),
        status: RowStatus::Fail,
        equation,
        expected_fibers: row.expected_fibers(),
        found_fibers: Vec::new(),
        c2: None,
        sigma0: None,
        height_flag: None,
        supersingular: None,
        fixed_fibers: None,
        diffs: vec![diff],
    };
    let model = match row.representative.build() {
        Ok(Some(m)) => m,
        Ok(None) => {
            let Representative::Unrealizable(why) = row.representative else { unreachable!() };
            return RowReport {
                status: RowStatus::Unrealizable,
                diffs: vec![why.to_string()],
                ..failed(String::new(), None)
            };
        }
        Err(e) => return failed(format!("representative: {e}"), None),
    };
    match check_row(row, rows, &model, execution) {
        Ok(r) => RowReport { index, ..r },
        Err(e) => failed(format!("analysis: {e}"), Some(model.equation())),
    }
}

/// Regenerates and analyzes every row of a table; mismatches are report content.
pub fn verify_table(id: &str, execution: Execution) -> Result<TableReport, GoldenError> {
    let t = table(id)?;
    let indexed: Vec<(usize, &GoldenRow)> = t.rows.iter().enumerate().collect();
    let rows = map_collect(execution, &indexed, |(i, row)| verify_row(*i, row, &t.rows, Execution::Sequential));
    let count = |s| rows.iter().filter(|r| r.status == s).count();
    let passed = count(RowStatus::Pass);
    let unrealizable = count(RowStatus::Unrealizable);
    let checked = rows.len() - unrealizable;
    Ok(TableReport {
        table: t.id.to_string(),
        title: t.title.to_string(),
        pass: passed == checked,
        checked,
        passed,
        unrealizable,
        rows,
    })
}
