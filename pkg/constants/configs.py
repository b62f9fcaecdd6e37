# Toolkit
TOOLKIT_VERSION = "1.0.0"

# Paths
OUTPUT_FOLDER = "./assets/outputs"
LOG_FILE = "spmc_toolkit.log"
LOG_LEVEL = "INFO"
SEQUENCE_MANIFEST_FILE = "sequence.txt"
RUN_MANIFEST_FILE = "run_manifest.json"
FRAME_FILE_PATTERN = "frame_{index:04d}.png"
HR_TRUTH_FILE = "hr.png"
FLOW_FILE_PATTERN = "flow_{offset}_to_ref.flo"
FLOW_FROM_REF_FILE_PATTERN = "flow_ref_to_{offset}.flo"
FLOW_TRACE_SUFFIX = "_trace.csv"
COVERAGE_SUFFIX = "_coverage.csv"

# Image I/O
INTENSITY_MAX_8BIT = 255.0
LUMINANCE_WEIGHTS = (0.299, 0.587, 0.114)  # BT.601

# Sampling kernels
BICUBIC_A = -0.5  # Keys kernel, Catmull-Rom

# Operators
GAUSSIAN_TRUNCATE_SIGMAS = 3.0
MATERIALIZE_MAX_SIDE = 16

# Flow estimation
DEFAULT_LAMBDA1 = 0.01
DEFAULT_PYRAMID_LEVELS = 3
DEFAULT_ITERATIONS_PER_LEVEL = 60
DEFAULT_FLOW_STEP_SIZE = 1.0
CHARBONNIER_EPSILON = 1e-3
ARMIJO_C = 1e-4
ARMIJO_SHRINK = 0.5
ARMIJO_MAX_HALVINGS = 30
PRECONDITIONER_DAMPING = 1e-3
FLOW_DIRECTION_CG_RTOL = 1e-6
FLOW_DIRECTION_CG_MAX_ITERS = 200
PYRAMID_ANTIALIAS_SIGMA = 1.0
FLO_TAG = 202021.25

# Reconstruction
DEFAULT_TIKHONOV_EPS = 1e-3
DEFAULT_CG_MAX_ITERS = 200
DEFAULT_CG_TOLERANCE = 1e-10
HOLE_DENOMINATOR_THRESHOLD = 1e-8
DEFAULT_LAMBDA2 = 0.01
KAPPA_FIRST = 0.5
KAPPA_LAST = 1.0

# Degradation
DEFAULT_SEED = 0
BICUBIC_CHAIN_FACTORS = (2, 3, 4)
INTEGER_SHIFT_TOLERANCE = 1e-9

# Metrics
DEFAULT_CROP_BORDER = 0
PSNR_CAP_DB = 99.0
SSIM_WINDOW_SIZE = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

# Verification
VERIFY_DEFAULT_TRIALS = 100
VERIFY_ADJOINT_TOLERANCE = 1e-10
VERIFY_IMAGE_GRADIENT_TOLERANCE = 1e-6
VERIFY_FLOW_GRADIENT_TOLERANCE = 1e-4
VERIFY_RECOVERY_TOLERANCE = 1e-10
VERIFY_FD_STEP = 1e-4
VERIFY_GRADIENT_SCALE_FLOOR = 1e-12
VERIFY_KINK_MARGIN = 1e-2
VERIFY_WARP_GRADIENT_TOLERANCE = 1e-3
VERIFY_WARP_EPSILON = 1e-1
VERIFY_IDENTITY_TRIALS = 50
