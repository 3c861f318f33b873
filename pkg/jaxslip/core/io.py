import os
from typing import Tuple, Union

import numpy as np

from jaxslip.core.fields import centre_velocity, check_field, state_from_field
from jaxslip.core.grid import x_centres, y_centres
from jaxslip.internals.types import FlowState, Grid, Field, TrajectorySummary, X_MODES, float_type

__all__ = [
    'save_field',
    'load_field',
    'write_field_csv',
    'write_series_csv',
    'SERIES_COLUMNS'
]

SERIES_COLUMNS = ('t', 'h_norm', 'v_norm', 'div_residual', 'energy_residual')
_HEADER_SIZE = 5


def save_field(path: Union[str, os.PathLike], state: FlowState, grid: Grid):
    """
    Write a state in the flat binary layout: a float64 header (nx, ny, n_trunc, x_mode index, t) followed by
    u, v, g and p, each row-major float64.
    """
    check_field(state, grid)
    header = np.asarray([grid.nx, grid.ny, grid.n_trunc, X_MODES.index(grid.x_mode), float(state.t)], np.float64)
    payload = [np.asarray(getattr(state, name), np.float64).ravel() for name in ('u', 'v', 'g', 'p')]
    np.concatenate([header] + payload).tofile(path)


def load_field(path: Union[str, os.PathLike]) -> Tuple[FlowState, Grid]:
    """
    Read a state written by `save_field`. The convective history is not stored and restarts empty.
    """
    data = np.fromfile(path, dtype=np.float64)
    if data.size < _HEADER_SIZE:
        raise ValueError(f"File {path} is too short to hold a field header.")
    nx, ny, n_trunc, mode_index, t = data[:_HEADER_SIZE]
    nx, ny, n_trunc = int(nx), int(ny), int(n_trunc)
    x_mode = X_MODES[int(mode_index)]
    grid = Grid(n_trunc=n_trunc, nx=nx, ny=ny, dx=2. * n_trunc / nx, dy=1. / ny, x_mode=x_mode)
    shapes = dict(u=(grid.nux, ny), v=(nx, ny + 1), g=(grid.nux,), p=(nx, ny))
    expected = _HEADER_SIZE + sum(int(np.prod(s)) for s in shapes.values())
    if data.size != expected:
        raise ValueError(f"File {path} holds {data.size} values, expected {expected} for the header's grid.")
    arrays = {}
    offset = _HEADER_SIZE
    for name, shape in shapes.items():
        size = int(np.prod(shape))
        arrays[name] = data[offset:offset + size].reshape(shape).astype(float_type)
        offset += size
    state = state_from_field(Field(u=arrays['u'], v=arrays['v'], g=arrays['g']), grid, t=t)
    return state._replace(p=arrays['p']), grid


def write_field_csv(path: Union[str, os.PathLike], state: FlowState, grid: Grid):
    """
    Cell-centred view of a state for inspection, columns x, y, u, v, p.
    """
    uc, vc = centre_velocity(state, grid)
    x, y = np.meshgrid(x_centres(grid), y_centres(grid), indexing='ij')
    table = np.stack([x.ravel(), y.ravel(), np.asarray(uc).ravel(), np.asarray(vc).ravel(),
                      np.asarray(state.p).ravel()], axis=1)
    np.savetxt(path, table, delimiter=',', header='x,y,u,v,p', comments='', fmt='%.17g')


def write_series_csv(path: Union[str, os.PathLike], summary: TrajectorySummary):
    table = np.stack([
        np.asarray(summary.times),
        np.asarray(summary.norms.h_norm),
        np.asarray(summary.norms.v_norm),
        np.asarray(summary.div_residual),
        np.asarray(summary.energy_residual)
    ], axis=1).reshape((-1, len(SERIES_COLUMNS)))
    np.savetxt(path, table, delimiter=',', header=','.join(SERIES_COLUMNS), comments='', fmt='%.17g')
