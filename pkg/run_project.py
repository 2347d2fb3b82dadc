"""
Simple script to check the project setup with a quick computation.
"""
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def main():
    """Import the CLI and compute one stationary branch and one residual."""
    print("=" * 70)
    print("kg-galerkin - Project Check")
    print("=" * 70)

    print("\n[1/3] Testing imports...")
    try:
        from scripts.python.cli import app  # noqa: F401
        print("✓ CLI module imported successfully")
    except Exception as e:
        print(f"✗ Failed to import CLI: {e}")
        return 1

    print("\n[2/3] Lowest stationary branch for lambda = -10...")
    try:
        from kgalerkin.application.stationary import branch_energy, build_branch

        branch = build_branch(-10.0, 1)
        print(f"✓ {branch.kind.value} branch, modulus {branch.modulus:.6f}, energy {branch_energy(branch):.5f}")
    except Exception as e:
        print(f"✗ Failed to build the branch: {e}")
        return 1

    print("\n[3/3] Residual of the state A = (1, 0)...")
    try:
        from kgalerkin.application.residual import total_residual
        from kgalerkin.utils.objects import StateVector

        print(f"✓ total residual {total_residual(StateVector.at_rest([1.0, 0.0])):.8f}")
    except Exception as e:
        print(f"✗ Failed to compute the residual: {e}")
        return 1

    print("\n" + "=" * 70)
    print("✓ Project setup looks good!")
    print("=" * 70)
    print("\nNext steps:")
    print("1. Optionally copy env_example.txt to .env")
    print("2. Run: python -m scripts.python.cli --help")
    print("3. Try: python -m scripts.python.cli stationary --lambda -10 --out results")
    print("=" * 70)

    return 0


if __name__ == "__main__":
    sys.exit(main())
