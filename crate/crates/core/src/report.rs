//! The full analysis pipeline and its serializable report.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::analyzer::{self, GroupSummary, IdempotentGrid};
use crate::closure::{RankSpectrum, SemigroupClosure};
use crate::decompose::{
    self, BasicType, ComponentSet, ProductKind, ReesCoord, VerificationReport,
};
use crate::error::Result;
use crate::machine::{Machine, Transform};
use crate::text;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSummary {
    pub image: Transform,
    /// Shortest input word producing this element.
    pub word: Vec<String>,
    pub rank: usize,
    pub idempotent: bool,
    pub tail: usize,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicitySummary {
    pub periodic: usize,
    pub with_tail: usize,
    pub max_tail: usize,
    pub max_period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub m: usize,
    pub n: usize,
    /// Element index of the reference idempotent.
    pub reference: usize,
    pub group: GroupSummary,
    /// Element indices of the reference group, in the order used by coordinates.
    pub group_elements: Vec<usize>,
    pub kind: ProductKind,
    pub idempotents_closed: bool,
    /// `sandwich[j][i]` as element indices.
    pub sandwich: Vec<Vec<usize>>,
    pub normalized_sandwich: Vec<Vec<usize>>,
    pub coords: Vec<ReesCoord>,
    pub components: ComponentSet,
    pub verification: VerificationReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineReport {
    pub machine: Machine,
    pub closure_size: usize,
    pub elements: Vec<ElementSummary>,
    pub rank_spectrum: RankSpectrum,
    pub simple: bool,
    pub constant_rank: bool,
    pub idempotent_count: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub grid_full: bool,
    pub periodicity: PeriodicitySummary,
    /// Present for closures of order at most two and for prime-order cyclic groups.
    pub basic_type: Option<BasicType>,
    /// Elements of minimum rank, reported when the closure is not simple.
    pub minimal_ideal: Option<Vec<usize>>,
    pub decomposition: Option<DecompositionSummary>,
}

/// Closure, structure analysis and, for simple closures, the verified decomposition.
pub fn decompose_machine(machine: &Machine, limit: usize) -> Result<MachineReport> {
    let s = SemigroupClosure::generate(machine, limit)?;
    let simple = s.is_simple();
    let periodicity = analyzer::periodicity_report(&s);
    let grid = IdempotentGrid::build(&s);

    let elements = (0..s.len())
        .map(|x| ElementSummary {
            image: s.element(x).clone(),
            word: s.witness_labels(x).into_iter().map(str::to_owned).collect(),
            rank: s.element(x).rank(),
            idempotent: s.product(x, x) == x,
            tail: periodicity[x].tail,
            period: periodicity[x].period,
        })
        .collect();

    let basic = decompose::classify_basic(&s);
    let basic_type = (s.len() <= 2 || matches!(basic, BasicType::Cyclic(_))).then_some(basic);

    let decomposition = if simple {
        let d = decompose::decompose(&s)?;
        let components = decompose::synthesize_components(&d);
        decompose::verify_components(&d, &components)?;
        let verification = decompose::recompose_verify(&s, &d);
        let to_elements = |rows: &[Vec<usize>]| -> Vec<Vec<usize>> {
            rows.iter()
                .map(|row| row.iter().map(|&g| d.group.members[g]).collect())
                .collect()
        };
        Some(DecompositionSummary {
            m: d.m,
            n: d.n,
            reference: d.reference,
            group: d.group.summary(&s),
            group_elements: d.group.members.clone(),
            kind: d.kind,
            idempotents_closed: d.idempotents_closed,
            sandwich: to_elements(&d.sandwich),
            normalized_sandwich: to_elements(&d.normalized_sandwich()),
            coords: d.coords.clone(),
            components,
            verification,
        })
    } else {
        None
    };

    Ok(MachineReport {
        machine: machine.clone(),
        closure_size: s.len(),
        elements,
        rank_spectrum: s.rank_spectrum(),
        simple,
        constant_rank: s.is_constant_rank(),
        idempotent_count: grid.idempotents.len(),
        grid_rows: grid.row_count(),
        grid_cols: grid.col_count(),
        grid_full: grid.is_full(),
        periodicity: PeriodicitySummary {
            periodic: periodicity.iter().filter(|p| p.tail == 0).count(),
            with_tail: periodicity.iter().filter(|p| p.tail > 0).count(),
            max_tail: periodicity.iter().map(|p| p.tail).max().unwrap_or(0),
            max_period: periodicity.iter().map(|p| p.period).max().unwrap_or(0),
        },
        basic_type,
        minimal_ideal: (!simple).then(|| s.minimal_rank_ideal()),
        decomposition,
    })
}

fn counts(map: &BTreeMap<usize, usize>) -> String {
    let parts: Vec<String> = map.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

fn indices(xs: &[usize]) -> String {
    xs.iter().map(|x| format!("#{x}")).collect::<Vec<_>>().join(" ")
}

fn indented(out: &mut String, body: &str, pad: &str) {
    for line in body.lines() {
        let _ = writeln!(out, "{pad}{line}");
    }
}

impl MachineReport {
    fn render_summary(&self, out: &mut String) {
        let labels: Vec<&str> = self.machine.labels().collect();
        let _ = writeln!(
            out,
            "machine: {} states, {} inputs ({})",
            self.machine.n(),
            labels.len(),
            labels.join(", ")
        );
        let _ = writeln!(out, "closure size: {}", self.closure_size);
        let _ = writeln!(out, "rank spectrum: {}", self.rank_spectrum);
        let _ = writeln!(out, "simple: {}", self.simple);
        let _ = writeln!(out, "constant rank: {}", self.constant_rank);
    }

    /// Human-readable analysis report.
    pub fn render_analysis(&self) -> String {
        let mut out = String::new();
        self.render_summary(&mut out);
        let _ = writeln!(
            out,
            "idempotents: {} (grid {} x {}{})",
            self.idempotent_count,
            self.grid_rows,
            self.grid_cols,
            if self.grid_full { ", full" } else { "" }
        );
        let p = &self.periodicity;
        let _ = writeln!(
            out,
            "periodicity: {} periodic, {} with tail (max tail {}, max period {})",
            p.periodic, p.with_tail, p.max_tail, p.max_period
        );
        if let Some(t) = self.basic_type {
            let _ = writeln!(out, "basic type: {t}");
        }
        if let Some(ideal) = &self.minimal_ideal {
            let _ = writeln!(out, "minimal ideal: {}", indices(ideal));
        }
        let _ = writeln!(out, "elements:");
        for (x, e) in self.elements.iter().enumerate() {
            let _ = writeln!(
                out,
                "  #{x} {} rank {} tail {} period {}{} word {}",
                e.image,
                e.rank,
                e.tail,
                e.period,
                if e.idempotent { " idempotent" } else { "" },
                e.word.join(" ")
            );
        }
        if self.decomposition.is_some() {
            out.push_str(&self.render_decomposition());
        }
        out
    }

    /// Human-readable decomposition section; empty when the closure is not simple.
    pub fn render_decomposition(&self) -> String {
        let Some(d) = &self.decomposition else {
            return String::new();
        };
        let mut out = String::new();
        let _ = writeln!(out, "decomposition:");
        let _ = writeln!(out, "  rows (m): {}", d.m);
        let _ = writeln!(out, "  columns (n): {}", d.n);
        let _ = writeln!(
            out,
            "  group: order {}, {}, element orders {}",
            d.group.order,
            if d.group.abelian { "abelian" } else { "non-abelian" },
            counts(&d.group.element_orders)
        );
        let _ = writeln!(out, "  group elements: {}", indices(&d.group_elements));
        let _ = writeln!(out, "  kind: {}", d.kind);
        let _ = writeln!(out, "  idempotents closed under product: {}", d.idempotents_closed);
        let _ = writeln!(out, "  reference idempotent: #{}", d.reference);
        let _ = writeln!(out, "  sandwich (row j, column i):");
        for row in &d.sandwich {
            let _ = writeln!(out, "    {}", indices(row));
        }
        let _ = writeln!(out, "  normalized sandwich:");
        for row in &d.normalized_sandwich {
            let _ = writeln!(out, "    {}", indices(row));
        }
        let _ = writeln!(out, "  coordinates (row, column, group):");
        for (x, c) in d.coords.iter().enumerate() {
            let _ = writeln!(out, "    #{x} {c}");
        }
        for (name, m) in [
            ("branch", &d.components.branch),
            ("reset", &d.components.reset),
            ("permutation", &d.components.permutation),
        ] {
            let _ = writeln!(out, "  {name} machine:");
            indented(&mut out, &text::serialize_machine(m), "    ");
        }
        let _ = writeln!(out, "  {}", render_verification(&d.verification));
        out
    }
}

pub fn render_verification(v: &VerificationReport) -> String {
    if v.passed {
        format!("verification: passed ({} pairs checked)", v.pairs_checked)
    } else if !v.bijective {
        "verification: FAILED (coordinates are not a bijection)".to_string()
    } else {
        let m = v.first_mismatch.as_ref().expect("failed check records a mismatch");
        format!(
            "verification: FAILED at #{} · #{}: law gives {}, closure gives {}",
            m.left, m.right, m.expected, m.actual
        )
    }
}

impl fmt::Display for MachineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_analysis())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::DEFAULT_CLOSURE_LIMIT;

    #[test]
    fn l2_report() {
        let m = Machine::from_images(3, &[&[0, 1, 1], &[0, 1, 0]]).unwrap();
        let r = decompose_machine(&m, DEFAULT_CLOSURE_LIMIT).unwrap();
        assert_eq!(r.closure_size, 2);
        assert!(r.simple && r.constant_rank);
        assert_eq!(r.basic_type, Some(BasicType::LeftCopy));
        let d = r.decomposition.as_ref().unwrap();
        assert_eq!((d.m, d.n, d.group.order), (2, 1, 1));
        assert!(d.verification.passed);
        assert_eq!(d.components.branch.n(), 3);
        assert!(r.minimal_ideal.is_none());
    }

    #[test]
    fn u2_report() {
        let m = Machine::from_images(3, &[&[0, 0, 1]]).unwrap();
        let r = decompose_machine(&m, DEFAULT_CLOSURE_LIMIT).unwrap();
        assert!(!r.simple);
        assert!(r.decomposition.is_none());
        assert_eq!(r.minimal_ideal, Some(vec![1]));
        assert_eq!(r.elements[1].image.image(), &[0, 0, 0]);
        assert_eq!(r.periodicity.max_tail, 1);
        assert_eq!(r.basic_type, Some(BasicType::Monotone));
    }

    #[test]
    fn c3_report() {
        let m = Machine::from_images(3, &[&[1, 2, 0]]).unwrap();
        let r = decompose_machine(&m, DEFAULT_CLOSURE_LIMIT).unwrap();
        let d = r.decomposition.as_ref().unwrap();
        assert_eq!((d.m, d.n, d.group.order), (1, 1, 3));
        assert_eq!(d.components.branch.n(), 1);
        assert_eq!(d.components.reset.n(), 1);
        assert_eq!(d.components.permutation.n(), 3);
        assert_eq!(r.basic_type, Some(BasicType::Cyclic(3)));
    }

    #[test]
    fn report_json_round_trip() {
        for images in [
            vec![vec![0, 1, 1], vec![0, 1, 0]],
            vec![vec![0, 0, 1]],
            vec![vec![1, 0, 2], vec![1, 2, 0], vec![0, 0, 2]],
        ] {
            let rows: Vec<&[usize]> = images.iter().map(Vec::as_slice).collect();
            let m = Machine::from_images(images[0].len(), &rows).unwrap();
            let r = decompose_machine(&m, DEFAULT_CLOSURE_LIMIT).unwrap();
            let json = serde_json::to_string(&r).unwrap();
            let back: MachineReport = serde_json::from_str(&json).unwrap();
            assert_eq!(back, r);
        }
    }
}
