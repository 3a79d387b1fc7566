from land.cli import main

main()
