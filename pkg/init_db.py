"""Initialize the result cache database and create all tables."""

import sys
sys.path.insert(0, '.')

from dotenv import load_dotenv
load_dotenv()

from app import database
from app.config import settings
from app.models import Base


def main() -> int:
    print("Initializing cache database...")
    if not database.init_db():
        print("[FAIL] Cache directory is not usable")
        return 1
    print(f"Database URL: {database.engine.url}")

    print("[OK] Cache tables created successfully!")
    print(f"\nCache directory: {settings.staircase_cache_dir}")
    print("Tables created:")
    for table in Base.metadata.tables:
        print(f"  - {table}")
    database.close_db()
    return 0


if __name__ == "__main__":
    sys.exit(main())
