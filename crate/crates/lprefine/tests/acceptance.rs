//! End-to-end acceptance checks.  Each test prints one pass/fail line; the
//! heavier oracles (naive set-of-pairs semantics, brute-force N-queens) are
//! implemented here from scratch so they are independent of the library's
//! own per-binding representation.

use std::collections::BTreeMap;
use std::fs;
use std::time::Instant;

use lprefine::derivation::replay;
use lprefine::emit::{emit_prolog, render};
use lprefine::exec::{
    broadcast, chain_join, e_and, e_or, e_seq, e_exists, e_forall, from_assert, from_spec,
    join, meet, refines, to_naive, Execution, ExecChain, JoinResult, NaiveExecution, Status,
};
use lprefine::laws::{
    build_pools, lookup, pointwise_refines, verify_law_with, VerifyCfg,
};
use lprefine::semantics::{cexec_in, fix, program_env, Env};
use lprefine::syntax::ast::{Command, Pred, Program};
use lprefine::syntax::{parse_command, parse_derivation, parse_pred, parse_program};
use lprefine::universe::{BindCtx, Space, Universe, VarId};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn load(name: &str) -> Program {
    let src = fs::read_to_string(fixture(name)).expect("fixture readable");
    parse_program(&src).expect("fixture parses")
}

fn verdict(n: usize, desc: &str, started: Instant, outcome: Result<(), String>) {
    match outcome {
        Ok(()) => println!(
            "criterion {}: pass - {} ({:.2?})",
            n,
            desc,
            started.elapsed()
        ),
        Err(e) => {
            println!("criterion {}: fail - {}: {}", n, desc, e);
            panic!("criterion {} failed: {}", n, e);
        }
    }
}

// ---------------------------------------------------------------------------
// 1. Golden executions of the diagonal specification.

#[test]
fn criterion_1_diagonal_golden() {
    let t = Instant::now();
    let p = load("spec51.wsl");
    let u = Universe::from_items(&p.universe).unwrap();
    let c = p.goal("diag").unwrap();
    let e = cexec_in(
        &u,
        &Env::new(),
        c,
        &Space::full(&u).unwrap(),
    )
    .unwrap();
    let outcome = (|| {
        if e.status
            != vec![
                Status::Succeed,
                Status::Fail,
                Status::Fail,
                Status::Succeed,
            ]
        {
            return Err(format!("statuses {:?}", e.status));
        }
        let n = to_naive(&e).unwrap();
        // The full state maps to the two diagonal bindings.
        if n.apply(0b1111) != Some(0b1001) {
            return Err("full-state image is not the diagonal".into());
        }
        // Each singleton maps to itself or to the empty state.
        for b in 0..4 {
            let expect = if b == 0 || b == 3 { 1 << b } else { 0 };
            if n.apply(1 << b) != Some(expect) {
                return Err(format!("singleton {} image wrong", b));
            }
        }
        Ok(())
    })();
    verdict(1, "diagonal specification golden executions", t, outcome);
}

// ---------------------------------------------------------------------------
// 2. Healthiness + naive oracle over all commands up to depth 3.

type NMap = BTreeMap<u64, u64>;

fn nmap_to_naive(m: &NMap, n_bindings: usize) -> NaiveExecution {
    NaiveExecution {
        n_bindings,
        pairs: m.iter().map(|(&s, &i)| (s, i)).collect(),
    }
}

fn subsets(mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut sub = mask;
    loop {
        out.push(sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    out
}

fn naive_spec(def: u64, truth: u64) -> NMap {
    subsets(def).into_iter().map(|s| (s, s & truth)).collect()
}

fn naive_assert(truth: u64) -> NMap {
    subsets(truth).into_iter().map(|s| (s, s)).collect()
}

fn naive_binary(a: &NMap, b: &NMap, f: impl Fn(u64, u64) -> u64) -> NMap {
    a.iter()
        .filter_map(|(&s, &ia)| b.get(&s).map(|&ib| (s, f(ia, ib))))
        .collect()
}

fn naive_seq(a: &NMap, b: &NMap) -> NMap {
    a.iter()
        .filter_map(|(&s, &ia)| b.get(&ia).map(|&out| (s, out)))
        .collect()
}

/// All binding indices agreeing with `b` everywhere except `v`.
fn column(space: &Space, b: usize, v: VarId) -> Vec<usize> {
    let stride = space.stride_of(v).unwrap();
    let axis = space.pos(v).unwrap();
    let dim = space.dims[axis];
    let base = b - ((b / stride) % dim) * stride;
    (0..dim).map(|k| base + k * stride).collect()
}

fn naive_quant(e: &NMap, space: &Space, v: VarId, forall: bool) -> NMap {
    let n = space.size;
    let mut out = NMap::new();
    for s in subsets((1u64 << n) - 1) {
        let mut unbound: u64 = 0;
        for b in 0..n {
            if s & (1 << b) != 0 {
                for c in column(space, b, v) {
                    unbound |= 1 << c;
                }
            }
        }
        if !e.contains_key(&unbound) {
            continue;
        }
        let mut img: u64 = 0;
        for b in 0..n {
            if s & (1 << b) == 0 {
                continue;
            }
            let col = column(space, b, v);
            let keep = if forall {
                col.iter().all(|&c| e.get(&(1 << c)) == Some(&(1u64 << c)))
            } else {
                col.iter().any(|&c| e.get(&(1 << c)) == Some(&(1u64 << c)))
            };
            if keep {
                img |= 1 << b;
            }
        }
        out.insert(s, img);
    }
    out
}

fn healthiness(n: &NaiveExecution) -> Result<(), String> {
    n.check_healthy().map_err(|e| e.to_string())?;
    // Image as union over singletons, and consistency under state restriction.
    for &(s, img) in &n.pairs {
        let union: u64 = (0..n.n_bindings)
            .filter(|&b| s & (1 << b) != 0)
            .filter_map(|b| n.apply(1 << b))
            .fold(0, |acc, i| acc | i);
        if union != img {
            return Err(format!("state {:#b} is not the union of its singletons", s));
        }
        for sub in subsets(s) {
            if n.apply(sub) != Some(img & sub) {
                return Err(format!("restriction of {:#b} to {:#b} disagrees", s, sub));
            }
        }
    }
    Ok(())
}

struct Node {
    exec: Execution,
    naive: NMap,
}

fn check_node(node: &Node, n_bindings: usize) -> Result<(), String> {
    let from_exec = to_naive(&node.exec).map_err(|e| e.to_string())?;
    let oracle = nmap_to_naive(&node.naive, n_bindings);
    if from_exec != oracle {
        return Err("per-binding semantics disagrees with the naive oracle".into());
    }
    healthiness(&oracle)
}

#[test]
fn criterion_2_depth_three_oracle() {
    let t = Instant::now();
    let p = parse_program(
        "universe { values int 0..1; var X in 0..1; var Y in 0..1; fun div/2 builtin; }",
    )
    .unwrap();
    let u = Universe::from_items(&p.universe).unwrap();
    let space = Space::full(&u).unwrap();
    let n = space.size;
    let preds: Vec<Pred> = ["true", "false", "X = Y", "Y = div(1, X)"]
        .iter()
        .map(|s| parse_pred(s).unwrap())
        .collect();
    let vars: Vec<VarId> = vec![u.var_id("X").unwrap(), u.var_id("Y").unwrap()];

    // Predicate truth and definedness masks per binding.
    let masks: Vec<(u64, u64)> = preds
        .iter()
        .map(|p| {
            let mut def = 0u64;
            let mut truth = 0u64;
            let mut vals = Vec::new();
            for idx in 0..n {
                space.decode_vals(&u, idx, &mut vals);
                let mut ctx = BindCtx::new(&space, &vals);
                match u.eval_pred(p, &mut ctx) {
                    lprefine::universe::PredValue::True => {
                        def |= 1 << idx;
                        truth |= 1 << idx;
                    }
                    lprefine::universe::PredValue::False => def |= 1 << idx,
                    lprefine::universe::PredValue::Undefined => {}
                }
            }
            (def, truth)
        })
        .collect();

    let outcome = (|| {
        let mut leaves = Vec::new();
        for (p, &(def, truth)) in preds.iter().zip(&masks) {
            leaves.push(Node {
                exec: from_spec(&u, &space, p),
                naive: naive_spec(def, truth),
            });
            leaves.push(Node {
                exec: from_assert(&u, &space, p),
                naive: naive_assert(truth),
            });
        }
        let combine = |pool: &[Node]| -> Result<Vec<Node>, String> {
            let mut out = Vec::new();
            for a in pool {
                for b in pool {
                    out.push(Node {
                        exec: e_or(&a.exec, &b.exec).unwrap(),
                        naive: naive_binary(&a.naive, &b.naive, |x, y| x | y),
                    });
                    out.push(Node {
                        exec: e_and(&a.exec, &b.exec).unwrap(),
                        naive: naive_binary(&a.naive, &b.naive, |x, y| x & y),
                    });
                    out.push(Node {
                        exec: e_seq(&a.exec, &b.exec).unwrap(),
                        naive: naive_seq(&a.naive, &b.naive),
                    });
                }
            }
            for a in pool {
                for &v in &vars {
                    let ex = broadcast(&e_exists(&u, &a.exec, v).unwrap(), &space).unwrap();
                    let fa = broadcast(&e_forall(&u, &a.exec, v).unwrap(), &space).unwrap();
                    out.push(Node {
                        exec: ex,
                        naive: naive_quant(&a.naive, &space, v, false),
                    });
                    out.push(Node {
                        exec: fa,
                        naive: naive_quant(&a.naive, &space, v, true),
                    });
                }
            }
            Ok(out)
        };

        for leaf in &leaves {
            check_node(leaf, n)?;
        }
        let depth2 = combine(&leaves)?;
        let mut pool2 = leaves;
        pool2.extend(depth2);
        for node in &pool2 {
            check_node(node, n)?;
        }
        let depth3 = combine(&pool2)?;
        let mut checked = pool2.len();
        for node in &depth3 {
            check_node(node, n)?;
            checked += 1;
        }
        if checked < 1000 {
            return Err(format!("only {} commands enumerated", checked));
        }
        println!("  (checked {} commands)", checked);
        Ok(())
    })();
    verdict(2, "depth-3 naive-oracle and healthiness sweep", t, outcome);
}

// ---------------------------------------------------------------------------
// 3. Law catalogue verification plus mutation self-test.

#[test]
fn criterion_3_law_catalogue() {
    let t = Instant::now();
    let cfg = VerifyCfg::default();
    let outcome = (|| {
        let pools = build_pools(&cfg).map_err(|e| e.to_string())?;
        let laws = lprefine::laws::catalogue();
        if laws.len() < 45 {
            return Err(format!("only {} laws in the catalogue", laws.len()));
        }
        for law in &laws {
            let report = verify_law_with(law, &pools, &cfg);
            if !report.passed() {
                return Err(format!("law {} has a counterexample", law.id));
            }
        }
        for id in ["pandtosand", "pandoversand", "removeassumpt"] {
            let reversed = lookup(id).map_err(|e| e.to_string())?.reversed();
            let report = verify_law_with(&reversed, &pools, &cfg);
            if report.passed() {
                return Err(format!("reversed {} was not caught", id));
            }
        }
        Ok(())
    })();
    verdict(3, "law catalogue all-pass and mutation self-test", t, outcome);
}

// ---------------------------------------------------------------------------
// 4. Recursion-block equivalences.

#[test]
fn criterion_4_recursion_equivalences() {
    let t = Instant::now();
    let p = load("rec82.wsl");
    let u = Universe::from_items(&p.universe).unwrap();
    let outcome = (|| {
        let env = program_env(&u, &p.procs).map_err(|e| e.to_string())?;
        let all_undef = |name: &str| -> Result<(), String> {
            let table = &env[name].table;
            if table.status.iter().all(|&s| s == Status::Undefined) {
                Ok(())
            } else {
                Err(format!("{} is not abort: {:?}", name, table.status))
            }
        };
        all_undef("loop")?;
        all_undef("pandloop")?;
        all_undef("porloop")?;
        let seq = &env["seqloop"].table;
        if seq.status != vec![Status::Fail, Status::Undefined] {
            return Err(format!("seqloop: {:?}", seq.status));
        }
        Ok(())
    })();
    verdict(4, "recursion-block fixed points", t, outcome);
}

// ---------------------------------------------------------------------------
// 5. Factorial end to end.

#[test]
fn criterion_5_factorial_end_to_end() {
    let t = Instant::now();
    let program = load("factorial.wsl");
    let script_src = fs::read_to_string(fixture("factorial.wsd")).unwrap();
    let script = parse_derivation(&script_src).unwrap();
    let outcome = (|| {
        let report = replay(&script, &program).map_err(|e| e.to_string())?;
        let u = Universe::from_items(&program.universe).unwrap();
        let fr = fix(&u, &Env::new(), &report.final_pcommand).map_err(|e| e.to_string())?;
        // Factorial values by unfolding the recurrence, independent of the
        // library's own arithmetic.
        let mut fact = vec![1i64];
        for i in 1..=4 {
            fact.push(i * fact[(i - 1) as usize]);
        }
        let var_u = u.var_id("U").unwrap();
        let var_v = u.var_id("V").unwrap();
        for &uid in u.domain(var_u) {
            for &vid in u.domain(var_v) {
                let uu = u.as_int(uid).unwrap();
                let vv = u.as_int(vid).unwrap();
                let st = fr.pexec.status_at(&u, &[uid, vid]).unwrap();
                let expect_succeed = vv == fact[uu as usize];
                if (st == Status::Succeed) != expect_succeed {
                    return Err(format!("f({}, {}) has status {:?}", uu, vv, st));
                }
            }
        }
        let refined = load("factorial_refined.wsl");
        let text = render(&emit_prolog(&refined).map_err(|e| e.to_string())?);
        let golden = fs::read_to_string(fixture("factorial_golden.pl")).unwrap();
        if text != golden {
            return Err("emitted Prolog does not match the golden file".into());
        }
        let strip = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        let published = "f(U,V) :- U=0, V=1. f(U,V) :- U>0, U1 is U-1, f(U1,V1), V is V1*U.";
        if strip(&text) != strip(published) {
            return Err("emitted Prolog differs from the published clauses".into());
        }
        Ok(())
    })();
    verdict(5, "factorial derivation, fixed point and emission", t, outcome);
}

// ---------------------------------------------------------------------------
// 6. N-queens end to end at N <= 3.

#[test]
fn criterion_6_queens_end_to_end() {
    let t = Instant::now();
    let program = load("queens.wsl");
    let script_src = fs::read_to_string(fixture("queens.wsd")).unwrap();
    let script = parse_derivation(&script_src).unwrap();
    let outcome = (|| {
        replay(&script, &program).map_err(|e| e.to_string())?;

        // Brute force: no full 3-queens placement is valid.
        let mut solutions = 0;
        for a in 1..=3i64 {
            for b in 1..=3i64 {
                for c in 1..=3i64 {
                    let s = [a, b, c];
                    let ok = (0..3).all(|i| {
                        (i + 1..3).all(|j| {
                            s[i] != s[j] && (i as i64 - j as i64).abs() != (s[i] - s[j]).abs()
                        })
                    });
                    if ok {
                        solutions += 1;
                    }
                }
            }
        }
        if solutions != 0 {
            return Err(format!("brute force found {} solutions", solutions));
        }

        let refined = load("queens_refined.wsl");
        let u = Universe::from_items(&refined.universe).unwrap();
        let env = program_env(&u, &refined.procs).map_err(|e| e.to_string())?;
        let nqueens = &env["nqueens"];
        let var_n = u.var_id("N").unwrap();
        let var_s = u.var_id("S").unwrap();
        let three = u
            .domain(var_n)
            .iter()
            .copied()
            .find(|&v| u.as_int(v) == Some(3))
            .unwrap();
        for &sid in u.domain(var_s) {
            let st = nqueens.status_at(&u, &[three, sid]).unwrap();
            if st == Status::Succeed {
                return Err(format!(
                    "nqueens(3, {}) unexpectedly succeeds",
                    u.display_value(sid)
                ));
            }
        }

        let text = render(&emit_prolog(&refined).map_err(|e| e.to_string())?);
        let golden = fs::read_to_string(fixture("queens_golden.pl")).unwrap();
        if text != golden {
            return Err("emitted Prolog does not match the golden file".into());
        }
        // Clause structure of the published listing.
        let mut counts: BTreeMap<(&str, usize), usize> = BTreeMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let head = line.split(":-").next().unwrap().trim().trim_end_matches('.');
            let name = head.split('(').next().unwrap();
            let arity = head
                .split_once('(')
                .map(|(_, rest)| {
                    let mut depth = 0usize;
                    let mut commas = 0usize;
                    for ch in rest.chars() {
                        match ch {
                            '(' | '[' => depth += 1,
                            ')' | ']' => depth = depth.saturating_sub(1),
                            ',' if depth == 0 => commas += 1,
                            _ => {}
                        }
                    }
                    commas + 1
                })
                .unwrap_or(0);
            let key = match name {
                "nqueens" => ("nqueens", arity),
                "nqacc" => ("nqacc", arity),
                "memrng" => ("memrng", arity),
                "norowclash" => ("norowclash", arity),
                "nodiagAcc" => ("nodiagAcc", arity),
                other => return Err(format!("unexpected predicate {}", other)),
            };
            *counts.entry(key).or_insert(0) += 1;
        }
        let expected: BTreeMap<(&str, usize), usize> = [
            (("nqueens", 2), 1),
            (("nqacc", 3), 2),
            (("memrng", 2), 2),
            (("norowclash", 2), 2),
            (("nodiagAcc", 3), 2),
        ]
        .into_iter()
        .collect();
        if counts != expected {
            return Err(format!("clause structure {:?}", counts));
        }
        Ok(())
    })();
    verdict(6, "N-queens derivation, empty 3-queens success set, emission", t, outcome);
}

// ---------------------------------------------------------------------------
// 7. Discrimination of the three division guards.

#[test]
fn criterion_7_guard_discrimination() {
    let t = Instant::now();
    let p = load("p123.wsl");
    let u = Universe::from_items(&p.universe).unwrap();
    let space = Space::full(&u).unwrap();
    let outcome = (|| {
        let status_at_x0 = |goal: &str| -> Result<Vec<Status>, String> {
            let c = p.goal(goal).ok_or_else(|| format!("no goal {}", goal))?;
            let e = cexec_in(&u, &Env::new(), c, &space).map_err(|e| e.to_string())?;
            let var_x = u.var_id("X").unwrap();
            let mut vals = Vec::new();
            let mut out = Vec::new();
            for idx in 0..space.size {
                space.decode_vals(&u, idx, &mut vals);
                let xv = vals[space.pos(var_x).unwrap()];
                if u.as_int(xv) == Some(0) {
                    out.push(e.status[idx]);
                }
            }
            Ok(out)
        };
        for (goal, expect) in [
            ("P1", Status::Undefined),
            ("P2", Status::Fail),
            ("P3", Status::Undefined),
        ] {
            let statuses = status_at_x0(goal)?;
            if statuses.is_empty() || !statuses.iter().all(|&s| s == expect) {
                return Err(format!("{} at X=0: {:?}", goal, statuses));
            }
        }
        Ok(())
    })();
    verdict(7, "P1/P2/P3 statuses at X = 0", t, outcome);
}

// ---------------------------------------------------------------------------
// 8. Lattice suite over all executions on four bindings.

#[test]
fn criterion_8_lattice_suite() {
    let t = Instant::now();
    let p = parse_program("universe { values int 0..3; var W in 0..3; }").unwrap();
    let u = Universe::from_items(&p.universe).unwrap();
    let space = Space::full(&u).unwrap();
    let statuses = [Status::Undefined, Status::Fail, Status::Succeed];
    let mut execs = Vec::new();
    for a in statuses {
        for b in statuses {
            for c in statuses {
                for d in statuses {
                    execs.push(Execution {
                        space: space.clone(),
                        status: vec![a, b, c, d],
                    });
                }
            }
        }
    }
    let outcome = (|| {
        let bottom = Execution::abort(space.clone());
        let mut bottoms = 0;
        for e1 in &execs {
            if !refines(e1, e1).unwrap() {
                return Err("refines is not reflexive".into());
            }
            if refines(&bottom, e1).unwrap() {
                // fine: abort refines everything
            } else {
                return Err("abort is not below some execution".into());
            }
            if execs.iter().all(|e| refines(e1, e).unwrap()) {
                bottoms += 1;
            }
        }
        if bottoms != 1 {
            return Err(format!("{} bottom elements", bottoms));
        }
        for e1 in &execs {
            for e2 in &execs {
                let r12 = refines(e1, e2).unwrap();
                let r21 = refines(e2, e1).unwrap();
                if r12 && r21 && e1 != e2 {
                    return Err("refines is not antisymmetric".into());
                }
                let m = meet(e1, e2).unwrap();
                if !refines(&m, e1).unwrap() || !refines(&m, e2).unwrap() {
                    return Err("meet is not a lower bound".into());
                }
                match join(e1, e2).unwrap() {
                    JoinResult::Joined(j) => {
                        if !refines(e1, &j).unwrap() || !refines(e2, &j).unwrap() {
                            return Err("join is not an upper bound".into());
                        }
                        if r12 && j != *e2 {
                            return Err("join of a refining pair is not the upper element".into());
                        }
                        for e3 in &execs {
                            if refines(e1, e3).unwrap() && refines(e2, e3).unwrap() {
                                if !refines(&j, e3).unwrap() {
                                    return Err("join is not least".into());
                                }
                            }
                            // Meet must be greatest among lower bounds.
                            if refines(e3, e1).unwrap()
                                && refines(e3, e2).unwrap()
                                && !refines(e3, &m).unwrap()
                            {
                                return Err("meet is not greatest".into());
                            }
                        }
                    }
                    JoinResult::Incompatible { .. } => {
                        if execs
                            .iter()
                            .any(|e3| refines(e1, e3).unwrap() && refines(e2, e3).unwrap())
                        {
                            return Err("join reported incompatible despite an upper bound".into());
                        }
                    }
                }
                for e3 in &execs {
                    if r12 && refines(e2, e3).unwrap() && !refines(e1, e3).unwrap() {
                        return Err("refines is not transitive".into());
                    }
                }
            }
        }
        // Every constructed fixed-point iterate chain joins to its limit.
        let mut fix_cases: Vec<(Universe, Env, lprefine::syntax::ast::PCommand)> = Vec::new();
        for name in ["factorial_refined.wsl", "rec82.wsl", "queens_refined.wsl"] {
            let prog = load(name);
            let uu = Universe::from_items(&prog.universe).unwrap();
            let mut env = Env::new();
            for (pname, pc) in &prog.procs {
                if matches!(pc, lprefine::syntax::ast::PCommand::Rec(..)) {
                    fix_cases.push((uu.clone(), env.clone(), pc.clone()));
                }
                let pe = lprefine::semantics::pexec(&uu, &env, pc).unwrap();
                env.insert(pname.clone(), pe);
            }
        }
        for (uu, env, pc) in &fix_cases {
            let fr = fix(uu, env, pc).map_err(|e| e.to_string())?;
            let chain = ExecChain::new(fr.iterates.clone()).map_err(|e| e.to_string())?;
            if chain_join(&chain) != fr.pexec.table {
                return Err("chain join differs from the converged fixed point".into());
            }
        }
        Ok(())
    })();
    verdict(8, "lattice laws over |Bnd| = 4 and iterate chains", t, outcome);
}

// ---------------------------------------------------------------------------
// 9. Pointwise coherence at depth 2.

#[test]
fn criterion_9_pointwise_coherence() {
    let t = Instant::now();
    let p = parse_program(
        "universe { values int 0..1; var X in 0..1; var Y in 0..1; fun div/2 builtin; }",
    )
    .unwrap();
    let u = Universe::from_items(&p.universe).unwrap();
    let space = Space::full(&u).unwrap();
    let env = Env::new();
    let outcome = (|| {
        let mut pool: Vec<Command> = Vec::new();
        for src in ["true", "false", "X = Y", "Y = div(1, X)"] {
            pool.push(parse_command(&format!("<{}>", src)).unwrap());
            pool.push(parse_command(&format!("{{{}}}", src)).unwrap());
        }
        let leaves = pool.clone();
        for a in &leaves {
            for b in &leaves {
                pool.push(Command::por(a.clone(), b.clone()));
                pool.push(Command::pand(a.clone(), b.clone()));
                pool.push(Command::sand(a.clone(), b.clone()));
            }
        }
        for a in &leaves {
            for v in ["X", "Y"] {
                pool.push(Command::Exists(v.into(), Box::new(a.clone())));
                pool.push(Command::Forall(v.into(), Box::new(a.clone())));
            }
        }
        let execs: Vec<Execution> = pool
            .iter()
            .map(|c| cexec_in(&u, &env, c, &space).unwrap())
            .collect();
        let mut checked = 0usize;
        for (c1, e1) in pool.iter().zip(&execs) {
            for (c2, e2) in pool.iter().zip(&execs) {
                let by_exec = refines(e1, e2).unwrap();
                let by_pointwise =
                    pointwise_refines(&u, &env, c1, c2, &[]).map_err(|e| e.to_string())?;
                if by_exec != by_pointwise {
                    return Err(format!(
                        "disagreement on a pair (exec {}, pointwise {})",
                        by_exec, by_pointwise
                    ));
                }
                checked += 1;
            }
        }
        println!("  (checked {} pairs)", checked);
        Ok(())
    })();
    verdict(9, "pointwise refinement coincides with execution refinement", t, outcome);
}
