from strictcat.cli import main

raise SystemExit(main())
