"""Proof kernel for cyclic sequent-calculus derivations over arithmetic.

The package splits into a syntax layer (terms, formulas, classification),
a calculus layer (sequents, rules, finite trees), the cyclic machinery
(annotations, validation, graph/tree conversions), certificate extraction,
programmatic proof builders, and a command-line front end.
"""

from .syntax import (Add, All, AllLe, And, CaptureError, DELTA0, Eq, Ex, ExLe,
                     Formula, Le, Mul, NLe, Neq, Or, PI, ParseError, SIGMA,
                     Succ, Term, V, Var, ZERO, Zero, classify, desugar,
                     free_vars, iff, impl, is_in, negate, numeral,
                     parse_formula, parse_term, render_formula, render_term,
                     substitute)
from .semantics import (DEFAULT_CUTOFF, DEFAULT_VALUE_BOUND, TV,
                        all_assignments, eval_formula, eval_term,
                        sequent_truth)
from .calculus import (Add0Rule, AddSRule, AllRule, AndRule, AssumeLeaf,
                       AxiomLeaf, BackLeaf, CaseRule, CutRule, ExRule,
                       Mult0Rule, MultSRule, OpenLeaf, OrRule, PredRule,
                       ProofNode, RefRule, RepRule, Rule, Sequent, StepError,
                       TreeIssue, WeakRule, check_step, check_tree, is_axiom,
                       parse_proof, parse_sequent, premises_of, render_proof,
                       walk)
from .annotation import (AnnotatedSequent, Mode, System, annotate_tree, erase,
                         is_annotated, parse_aseq, propagate)
from .checker import (CyclicProof, ValidationReport, Violation, parse_report,
                      render_report, soundness_sample, validate)
from .transform import (RavelError, RegularProofGraph, expand_graph, graph_of,
                        parse_graph, prefix_equal, ravel, render_graph,
                        unravel)
from .uncycle import (ExtractionError, InductionCertificate, Obligation,
                      certificate_with_theta, check_certificate_bounded,
                      extract_all, extract_certificate, parse_certificate,
                      render_certificate)
from .builders import (PreError, forall_cycle_proof, induction_rule_proof,
                       induction_rule_via_assumptions, induction_schema_proof,
                       omega_truncation, prove_ground_atom, step_from_assumption,
                       tautology, two_loops_proof)

__version__ = "0.1.0"
