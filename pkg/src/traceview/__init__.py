"""traceview: keep, group and compare exploration states.

The engine captures the complete configuration of a (mock)
visualization host as reloadable viewpoints, strings them into ordered
scenarios, and quantifies how far apart viewpoints are via a weighted
preference diff with a 2D projection for n-way comparison.
"""

from .areas import Area, AreaList, default_areas, load_areas
from .diff import (
    CategoryDiff,
    DiffReport,
    PreferenceDelta,
    calibrate_scale,
    diff,
    diff_from_xml,
    diff_to_xml,
    distance_matrix,
    top_categories,
)
from .errors import (
    MissingDatasetError,
    PlaybackError,
    StorageError,
    TraceViewError,
    UnknownPreferenceError,
    ValidationError,
)
from .hoststate import (
    ApplicationState,
    Column,
    Filter,
    MoveWindow,
    RangeCriterion,
    Relation,
    SetAttributes,
    SetCriterion,
    SetCurrentNode,
    SetFilterRange,
    Snapshot,
    View,
)
from .projection import (
    DistanceMatrix,
    HistogramBin,
    Layout2D,
    PairQuality,
    QualityMetrics,
    export_layout,
    jacobi_eigh,
    mds_project,
    quality,
    scenario_from_path,
)
from .schema import (
    AssignmentKey,
    PreferenceCategory,
    PreferenceDefinition,
    PreferenceSchema,
    PrefKind,
    ScopeLevel,
    applicable_at,
    default_schema,
    load_schema,
    lookup,
    parse_schema,
    total_weight,
)
from .scenario import (
    PlaybackCursor,
    Scenario,
    ScenarioStep,
    StepPreview,
    create,
    insert_step,
    move_step,
    playback,
    preview,
    remove_step,
)
from .viewpoint import (
    Attitude,
    ContentMeta,
    FileMeta,
    MetaDraft,
    OwnerMeta,
    Priority,
    Viewpoint,
    apply,
    capture,
    edit_metadata,
)
from .workspace import Workspace

__version__ = "0.1.0"
