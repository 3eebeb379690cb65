import os
import sys
import argparse
from typing import Any, Dict, List, Optional

# sys path 설정
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
src_path = os.path.join(project_root, 'src')
sys.path.append(src_path)

import pandas as pd

from bounds.separation_bounds import all_pair_reports
from discovery.gsp import estimate_dag
from discovery.targets import identify_targets
from evaluation.metrics import avg_jaccard, match_components, mixing_weight_error, parameter_estimation_error, shd
from fitting.gmm_fit import select_components
from harness.experiment import run_experiment, shift_sweep, variance_sweep
from harness.graph_gen import build_interventions, random_graph
from harness.plot_data import emit_plot_data
from harness.sachs import load_manifest, load_sachs, sachs_cutoff_sweep
from helpers import load_structured, parse_number_list, save_json
from models.experiment_model import ExperimentConfig
from models.fit_model import FitConfig
from models.sem_model import NoiseSpec
from sem.mixture_gen import make_mixture, sample_mixture
from sem.sem_core import build_sem, observational_params, sample_component
from storage.dataset_io import export_labels, load_dataset, save_dataset
from storage.serialization import (fit_from_dict, fit_to_dict, graph_from_dict, graph_to_dict, report_to_row,
                                   selected_fit, sem_from_dict, truth_from_dict, truth_to_dict)
from utils.errors import InvalidConfig, MixsemError
from utils.logger import get_logger, set_level
from utils.rng_utils import derive_seed, split_seed

logger = get_logger("mixsem")


# ---------------------------------------------------------------------
# 설정 구성
# ---------------------------------------------------------------------
def experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """--config 파일을 읽고 명시된 플래그로 덮어씁니다."""
    data: Dict[str, Any] = load_structured(args.config) if getattr(args, "config", None) else {}
    overrides = {
        "n": getattr(args, "n", None),
        "density": getattr(args, "density", None),
        "intervention_kind": getattr(args, "kind", None),
        "coverage": getattr(args, "coverage", None),
        "cutoff": getattr(args, "cutoff", None),
        "alpha": getattr(args, "alpha", None),
        "restarts": getattr(args, "restarts", None),
        "output_dir": getattr(args, "out_dir", None),
        "workers": getattr(args, "workers", None),
    }
    if getattr(args, "sizes", None):
        overrides["sample_sizes"] = [int(v) for v in parse_number_list(args.sizes)]
    if getattr(args, "seeds", None):
        overrides["seeds"] = [int(v) for v in parse_number_list(args.seeds)]
    data.update({k: v for k, v in overrides.items() if v is not None})
    if "n" not in data:
        raise InvalidConfig("node count is required (--n or config file)")
    return ExperimentConfig(**data)


def fit_config(args: argparse.Namespace) -> FitConfig:
    return FitConfig(seed=args.seed, workers=getattr(args, "workers", None))


# ---------------------------------------------------------------------
# 서브커맨드
# ---------------------------------------------------------------------
def cmd_simulate(args: argparse.Namespace) -> None:
    cfg = experiment_config(args)
    size = int(parse_number_list(args.N)[0]) if args.N else cfg.sample_sizes[0]
    if args.sem:
        sem = sem_from_dict(load_structured(args.sem))
    else:
        dag = random_graph(cfg.n, cfg.density, cfg.weight_range, derive_seed(args.seed, 0))
        sem = build_sem(dag, NoiseSpec.standard(cfg.n, cfg.noise_variance))
    interventions = build_interventions(sem, cfg, split_seed(args.seed, 1))
    spec = make_mixture(sem, interventions, include_observational=cfg.include_observational)

    mixture = sample_mixture(spec, size, derive_seed(args.seed, 2, size))
    obs = sample_component(observational_params(sem), size, derive_seed(args.seed, 3, size))

    out = cfg.output_dir
    save_json(truth_to_dict(sem, interventions, spec), os.path.join(out, "truth.json"))
    mix_path = save_dataset(mixture, os.path.join(out, "mix.csv"))
    export_labels(mixture, mix_path)
    save_dataset(obs, os.path.join(out, "obs.csv"))
    logger.info(f"simulate: n={sem.n} components={spec.k} N={size} -> {out}")


def cmd_fit(args: argparse.Namespace) -> None:
    data = load_dataset(args.data)
    k_star, fits = select_components(data, data.n, args.cutoff, fit_config(args))
    save_json(fit_to_dict(k_star, fits), args.out)


def cmd_discover(args: argparse.Namespace) -> None:
    fit = selected_fit(load_structured(args.fit))
    obs = load_dataset(args.obs)
    targets = identify_targets(fit, obs, args.alpha)
    graph = estimate_dag(obs, fit, targets, args.alpha, args.restarts, args.seed, workers=args.workers)
    save_json(graph_to_dict(graph, targets), args.out)


def cmd_bounds(args: argparse.Namespace) -> None:
    data = load_structured(args.sem)
    if "sem" in data:
        sem, interventions, _ = truth_from_dict(data)
    else:
        sem = sem_from_dict(data)
        cfg = ExperimentConfig(n=sem.n, intervention_kind=args.kind, output_dir=os.path.dirname(args.out) or ".")
        interventions = build_interventions(sem, cfg, split_seed(args.seed, 1))
    reports = all_pair_reports(sem, interventions)
    if args.pairs == "observational":
        reports = [r for r in reports if r.target_j is None]
    frame = pd.DataFrame([report_to_row(r) for r in reports])
    directory = os.path.dirname(args.out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(args.out, index=False, encoding="utf-8")
    logger.info(f"bounds: {len(reports)} pairs -> {args.out}")


def cmd_eval(args: argparse.Namespace) -> None:
    sem, _, spec = truth_from_dict(load_structured(args.truth))
    fit_data = load_structured(args.fit)
    k_star, _ = fit_from_dict(fit_data)
    fit = selected_fit(fit_data)
    matching = match_components(spec, fit, strict=args.strict)
    metrics: Dict[str, Any] = {
        "k_true": spec.k,
        "k_star": k_star,
        "param_err": parameter_estimation_error(matching),
        "weight_err": mixing_weight_error(spec, fit, matching.assignment),
        "deficit": matching.deficit,
        "assignment": {str(t): e for t, e in matching.assignment.items()},
    }
    if args.graph:
        graph, targets = graph_from_dict(load_structured(args.graph))
        metrics["shd"] = shd(graph, sem.dag)
        if len(targets.per_component) == fit.k:
            metrics["jaccard"] = avg_jaccard(spec.true_targets, targets.per_component, matching.assignment)
    save_json(metrics, args.out)


def cmd_sweep(args: argparse.Namespace) -> None:
    cfg = experiment_config(args)
    if cfg.record_runtime and args.no_runtime:
        cfg = cfg.model_copy(update={"record_runtime": False})
    if args.variance_values:
        results = variance_sweep(cfg, parse_number_list(args.variance_values))
    elif args.shift_values:
        results = shift_sweep(cfg, parse_number_list(args.shift_values))
    else:
        results = run_experiment(cfg)
    if args.plot:
        emit_plot_data(results, args.plot, os.path.join(cfg.output_dir, "plot_data"))


def cmd_sachs(args: argparse.Namespace) -> None:
    data = load_sachs(args.data, load_manifest(args.manifest))
    cutoffs = parse_number_list(args.cutoffs)
    table = sachs_cutoff_sweep(data, cutoffs, args.alpha, args.restarts, args.seed, FitConfig(workers=args.workers))
    directory = os.path.dirname(args.out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    table.to_csv(args.out, index=False, encoding="utf-8")
    logger.info(f"sachs sweep -> {args.out}")


# ---------------------------------------------------------------------
# 인자 파서
# ---------------------------------------------------------------------
def _experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="ExperimentConfig JSON/YAML")
    p.add_argument("--n", type=int)
    p.add_argument("--density", type=float)
    p.add_argument("--kind", choices=["do", "stochastic", "shift", "soft"])
    p.add_argument("--coverage", choices=["all", "half"])
    p.add_argument("--sizes", help="예: 2^10,2^12,2^15")
    p.add_argument("--seeds", help="예: 0,1,2")
    p.add_argument("--cutoff", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--out-dir", dest="out_dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixsem", description="Mixtures of interventional linear Gaussian SEMs")
    parser.add_argument("--workers", type=int, default=None, help="thread pool size (default MIXSEM_WORKERS)")
    parser.add_argument("--log-level", dest="log_level", default=None, help="DEBUG, INFO, WARNING ... (default MIXSEM_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="SEM + 혼합 데이터 생성")
    _experiment_flags(p)
    p.add_argument("--sem", help="기존 SEM JSON")
    p.add_argument("--N", help="표본 수")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="EM + 컴포넌트 수 선택")
    p.add_argument("--data", required=True)
    p.add_argument("--cutoff", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="fit.json")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("discover", help="타깃 식별 + DAG 추정")
    p.add_argument("--fit", required=True)
    p.add_argument("--obs", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="graph.json")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("bounds", help="분리 하한 리포트")
    p.add_argument("--sem", required=True, help="SEM JSON 또는 truth.json")
    p.add_argument("--pairs", choices=["all", "observational"], default="all")
    p.add_argument("--kind", choices=["do", "stochastic", "shift", "soft"], default="stochastic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="report.csv")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("eval", help="지표 계산")
    p.add_argument("--truth", required=True)
    p.add_argument("--fit", required=True)
    p.add_argument("--graph")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", default="metrics.json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="시뮬레이션 스윕")
    _experiment_flags(p)
    p.add_argument("--variance-values", dest="variance_values")
    p.add_argument("--shift-values", dest="shift_values")
    p.add_argument("--plot", default="all", help="metric 이름, all, 또는 빈 문자열")
    p.add_argument("--no-runtime", dest="no_runtime", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sachs", help="Sachs 데이터 cutoff 스윕")
    p.add_argument("--data", required=True)
    p.add_argument("--manifest")
    p.add_argument("--cutoffs", default="0.07,0.1,0.15,0.2")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results/sachs.csv")
    p.set_defaults(func=cmd_sachs)
    return parser


# 메인 함수
def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_level(args.log_level)
    try:
        args.func(args)
    except MixsemError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("중지되었습니다.")
        sys.exit(0)
