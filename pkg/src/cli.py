# src/cli.py

"""
IsoCond 명령행 도구.

    python src/cli.py ik --pose 0,0,0 --mode +++
    python src/cli.py sweep --matrix K --levels 0.2,0.4,0.6 --format gnuplot -o out/k.csv

종료 코드: 0 정상, 1 사용법/입력 오류, 2 도메인 오류.
"""

import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import click
from pydantic import ValidationError

from core.config import get_settings
from core.logging_config import configure_logging
from manipulator.exceptions import InvalidLevelException, ManipulatorException
from manipulator.isoloci import validate_levels
from manipulator.singularity import line_concurrency_residual
from schemas.manipulator_schemas import KappaVariant, MatrixKind, Pose, WorkingMode
from services.analysis.analysis_service import get_analysis_service
from services.export.export_service import ExportService, format_number

logger = logging.getLogger(__name__)


class ModeType(click.ParamType):
    name = "mode"

    def convert(self, value, param, ctx):
        if isinstance(value, WorkingMode):
            return value
        try:
            return WorkingMode.from_string(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


class FloatListType(click.ParamType):
    """쉼표로 구분한 실수 목록. size 가 있으면 개수를 검사합니다."""
    name = "floats"

    def __init__(self, size: Optional[int] = None):
        self.size = size

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            numbers = tuple(float(v) for v in value.split(","))
        except ValueError:
            self.fail(f"실수 목록이 아닙니다: '{value}'", param, ctx)
        if self.size is not None and len(numbers) != self.size:
            self.fail(f"값 {self.size}개가 필요합니다: '{value}'", param, ctx)
        return numbers


class LevelsType(FloatListType):
    """등조건 레벨 목록. 스윕 전에 (0, 1) 구간을 검사합니다."""
    name = "levels"

    def convert(self, value, param, ctx):
        numbers = super().convert(value, param, ctx)
        try:
            return tuple(validate_levels(numbers))
        except InvalidLevelException as e:
            self.fail(str(e), param, ctx)


class MatrixType(click.ParamType):
    name = "matrix"

    def convert(self, value, param, ctx):
        if isinstance(value, MatrixKind):
            return value
        try:
            return MatrixKind.parse(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


MODE = ModeType()
POSE = FloatListType(3)
RANGE = FloatListType(2)
LEVELS = LevelsType()
MATRIX = MatrixType()


def _pose(values) -> Pose:
    return Pose(x=values[0], y=values[1], theta=values[2])


class Context:
    def __init__(self, params_path: Optional[str], precision: int):
        self.service = get_analysis_service()
        self.params = self.service.load_params(params_path)
        self.exporter = ExportService(precision)

    def fmt(self, value: float) -> str:
        return self.exporter._fmt(value)

    def table(self, header: Sequence[str], rows: List[Sequence[str]]) -> None:
        widths = [max(len(str(r[c])) for r in [header, *rows]) for c in range(len(header))]
        for row in [header, *rows]:
            click.echo("  ".join(str(cell).rjust(w) for cell, w in zip(row, widths)))


pass_context = click.make_pass_decorator(Context)
_settings = get_settings()


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--params", "params_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="DesignParams JSON 파일 (생략 시 R=200, l=200, r=100 mm)")
@click.option("--precision", type=click.IntRange(1, 17), default=6, show_default=True,
              help="출력 유효숫자 자릿수")
@click.option("--log-level", default=_settings.log_level, show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.pass_context
def cli(ctx: click.Context, params_path: Optional[str], precision: int, log_level: str):
    """평면 3-PRR 매니퓰레이터 기구학/조건수 분석"""
    configure_logging(log_level)
    ctx.obj = Context(params_path, precision)


@cli.command()
@click.option("--pose", "pose", type=POSE, required=True, help="x,y,theta (mm, mm, rad)")
@click.option("--mode", type=MODE, default="+++", show_default=True, help="작업 모드 부호 (예: +-+)")
@pass_context
def ik(obj: Context, pose, mode: WorkingMode):
    """역기구학: 다리별 ρ, m, γ, k"""
    limbs = obj.service.inverse(obj.params, _pose(pose), mode)
    obj.table(
        ("limb", "rho_mm", "m_mm", "gamma_rad", "k_mm2"),
        [(l.limb, obj.fmt(l.rho), obj.fmt(l.m), obj.fmt(l.gamma), obj.fmt(l.k)) for l in limbs],
    )


@cli.command()
@click.option("--rho", type=POSE, required=True, help="rho1,rho2,rho3 (mm)")
@click.option("--seed", type=POSE, default="0,0,0", show_default=True, help="Newton 초기 자세 x,y,theta")
@pass_context
def dk(obj: Context, rho, seed):
    """순기구학 (Newton 반복)"""
    pose = obj.service.direct(obj.params, rho, _pose(seed))
    obj.table(("x_mm", "y_mm", "theta_rad"), [(obj.fmt(pose.x), obj.fmt(pose.y), obj.fmt(pose.theta))])


@cli.command()
@click.option("--pose", "pose", type=POSE, required=True, help="x,y,theta (mm, mm, rad)")
@click.option("--mode", type=MODE, default="+++", show_default=True)
@click.option("--L", "L", type=float, default=_settings.characteristic_length_mm, show_default=True,
              help="특성 길이 (mm)")
@click.option("--kappa-b", type=click.Choice([v.value for v in KappaVariant]), default="ratio", show_default=True)
@pass_context
def jacobians(obj: Context, pose, mode: WorkingMode, L: float, kappa_b: str):
    """A, B, Ā, K̄, J 와 조건수 (JSON)"""
    report = obj.service.jacobian_report(obj.params, _pose(pose), mode, L, KappaVariant(kappa_b))
    conditioning = {
        kind: None if value is None else {
            "singular_values": [float(obj.fmt(v)) for v in value.singular_values],
            "kappa": None if value.singular else float(obj.fmt(value.kappa)),
            "index": float(obj.fmt(value.index)),
        }
        for kind, value in report["conditioning"].items()
    }
    click.echo(json.dumps({
        "limbs": [l.to_dict() for l in report["limbs"]],
        "matrices": report["matrices"].to_dict(),
        "conditioning": conditioning,
    }, indent=2))


@cli.command()
@click.option("--pose", "pose", type=POSE, required=True, help="x,y,theta (mm, mm, rad)")
@click.option("--mode", type=MODE, default="+++", show_default=True)
@click.option("--L", "L", type=float, default=_settings.characteristic_length_mm, show_default=True)
@pass_context
def classify(obj: Context, pose, mode: WorkingMode, L: float):
    """특이 판정: Regular / SerialSingular / ParallelSingular / Both"""
    pose = _pose(pose)
    report = obj.service.classify(obj.params, pose, mode, L)
    limbs, _ = obj.service.matrices(obj.params, pose, mode, L)
    residual = line_concurrency_residual(limbs)
    click.echo(f"classification  {report.classification.value}")
    click.echo(f"parallel_measure  {obj.fmt(report.parallel_measure)}")
    click.echo(f"serial_measure  {obj.fmt(report.serial_measure)}")
    click.echo(f"serial_limbs  {','.join(str(i) for i in report.serial_limbs) or '-'}")
    click.echo(f"concurrency_residual_mm  {'parallel' if math.isinf(residual) else obj.fmt(residual)}")


@cli.command()
@click.option("--gamma", type=float, default=None, help="γ (rad). 생략하면 등방 탐색으로 L 을 구합니다")
@click.option("--mode", type=MODE, default="+++", show_default=True)
@pass_context
def charlen(obj: Context, gamma: Optional[float], mode: WorkingMode):
    """특성 길이 L = √2·r·sin γ"""
    length, result = obj.service.characteristic_length(obj.params, gamma, mode)
    click.echo(f"L_mm  {obj.fmt(length.L)}")
    click.echo(f"gamma_rad  {obj.fmt(length.gamma)}")
    if result is not None:
        click.echo(f"index  {obj.fmt(result.index)}")
        click.echo(f"pose  {obj.fmt(result.pose.x)},{obj.fmt(result.pose.y)},{obj.fmt(result.pose.theta)}")


@cli.command()
@click.option("--mode", type=MODE, default="+++", show_default=True)
@click.option("--L-init", "L_init", type=float, default=_settings.characteristic_length_mm, show_default=True)
@click.option("--target", type=MATRIX, default="K", show_default=True, help="A 또는 K")
@pass_context
def isotropy(obj: Context, mode: WorkingMode, L_init: float, target: MatrixKind):
    """등방 자세 탐색과 같음 조건, 쌍별 L 점검"""
    if target is MatrixKind.B:
        raise click.BadParameter("등방 탐색 대상은 A 또는 K 입니다", param_hint="--target")
    result = obj.service.find_isotropic(obj.params, mode, L_init, target)
    report = obj.service.isotropy_report(obj.params, result)
    pose = result.pose
    click.echo(f"isotropic  {'yes' if result.isotropic else 'no'}")
    click.echo(f"pose  {obj.fmt(pose.x)},{obj.fmt(pose.y)},{obj.fmt(pose.theta)}")
    click.echo(f"L_mm  {obj.fmt(result.characteristic_length.L)}")
    click.echo(f"index  {obj.fmt(result.index)}")
    click.echo(f"restarts  {result.restarts}")
    for name, deviation in report["equalities"].items():
        click.echo(f"{name}  {obj.fmt(deviation)}")
    for pair, value in report["pairwise_L"].items():
        click.echo(f"L_pair_{pair}  {obj.fmt(value)}")
    click.echo(f"L_closed_form  {obj.fmt(report['closed_form_L'])}")
    for violation in result.structure.violations:
        click.echo(f"warning  {violation}")


@cli.command()
@click.option("--matrix", type=MATRIX, default="A", show_default=True, help="A (Ā), B, K (K̄)")
@click.option("--mode", type=MODE, default="+++", show_default=True)
@click.option("--nx", type=click.IntRange(min=2), default=_settings.sweep_nx, show_default=True)
@click.option("--ny", type=click.IntRange(min=2), default=_settings.sweep_ny, show_default=True)
@click.option("--ntheta", type=click.IntRange(min=4), default=_settings.sweep_n_theta, show_default=True)
@click.option("--xrange", type=RANGE, default=",".join(str(v) for v in _settings.sweep_x_range), show_default=True)
@click.option("--yrange", type=RANGE, default=",".join(str(v) for v in _settings.sweep_y_range), show_default=True)
@click.option("--L", "L", type=float, default=_settings.characteristic_length_mm, show_default=True)
@click.option("--kappa-b", type=click.Choice([v.value for v in KappaVariant]), default="ratio", show_default=True)
@click.option("--refine/--no-refine", default=False, show_default=True, help="argmax θ 주변 황금분할 보정")
@click.option("--levels", type=LEVELS, default=None, help="등조건 곡선 레벨 (예: 0.2,0.4,0.6)")
@click.option("--format", "output_format", type=click.Choice(["csv", "json", "gnuplot"]), default="csv",
              show_default=True, help="gnuplot 이면 격자는 CSV, 곡선은 gnuplot 텍스트로 씁니다")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="격자 파일 (기본 sweep.csv / sweep.json)")
@click.option("--loci-output", type=click.Path(dir_okay=False), default=None, help="곡선 파일 (기본: 격자 파일 이름 + _loci)")
@pass_context
def sweep(obj: Context, matrix, mode, nx, ny, ntheta, xrange, yrange, L, kappa_b, refine, levels,
          output_format, output, loci_output):
    """작업공간 스윕. 전역 index 를 표준 출력에 한 줄로 씁니다."""
    spec = obj.service.default_spec(
        x_range=xrange, y_range=yrange, nx=nx, ny=ny, n_theta=ntheta, matrix_kind=matrix, mode=mode,
        L=L, kappa_b_variant=KappaVariant(kappa_b), refine_theta=refine,
    )
    grid, loci, value = obj.service.sweep(obj.params, spec, levels)

    grid_json = output_format == "json"
    output = Path(output or ("sweep.json" if grid_json else "sweep.csv"))
    obj.exporter.write(output, obj.exporter.grid_to_json(grid) if grid_json else obj.exporter.grid_to_csv(grid))
    if loci is not None:
        gnuplot = output_format == "gnuplot"
        suffix = ".gp" if gnuplot else ".json"
        loci_path = Path(loci_output or output.with_name(f"{output.stem}_loci{suffix}"))
        obj.exporter.write(loci_path, obj.exporter.loci_to_gnuplot(loci) if gnuplot else obj.exporter.loci_to_json(loci))
    click.echo(obj.fmt(value))


@cli.command()
@click.option("--nx", type=click.IntRange(min=2), default=_settings.sweep_nx, show_default=True)
@click.option("--ny", type=click.IntRange(min=2), default=_settings.sweep_ny, show_default=True)
@click.option("--ntheta", type=click.IntRange(min=4), default=_settings.sweep_n_theta, show_default=True)
@click.option("--L", "L", type=float, default=_settings.characteristic_length_mm, show_default=True)
@click.option("--kappa-b", type=click.Choice([v.value for v in KappaVariant]), default="ratio", show_default=True)
@pass_context
def compare(obj: Context, nx, ny, ntheta, L, kappa_b):
    """두 대표 작업 모드의 전역 index 표 (소수 셋째 자리)"""
    template = obj.service.default_spec(nx=nx, ny=ny, n_theta=ntheta, L=L, kappa_b_variant=KappaVariant(kappa_b))
    comparison = obj.service.compare(obj.params, template)
    obj.table(
        ("mode", *(kind.value for kind in comparison.kinds)),
        [(str(mode), *(f"{v:.3f}" for v in row)) for mode, row in zip(comparison.modes, comparison.table)],
    )
    separation = comparison.separation()
    logger.info("모드 차이 (두 번째 − 첫 번째): " + ", ".join(f"{k.value} {v:+.3f}" for k, v in separation.items()))


def run(argv: Optional[Sequence[str]] = None) -> int:
    """명령을 실행하고 종료 코드를 반환합니다."""
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name="isocond", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("중단되었습니다", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except ManipulatorException as e:
        click.echo(f"{type(e).__name__}: {e}", err=True)
        return 2
    except (ValidationError, ValueError) as e:
        click.echo(f"입력 오류: {e}", err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(run())
