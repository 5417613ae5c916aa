from opcheb.verifier.src.verifier_cli import app

if __name__ == "__main__":
    app()
