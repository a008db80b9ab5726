import java.util.Scanner;

public class Main {
    static final long MOD = 1000000007L;

    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        int n = sc.nextInt();
        int a = 0;
        int b = 1;
        for (int i = 0; i < n; i++) {
            int c = (int) ((a + b) % MOD);
            a = b;
            b = c;
        }
        System.out.println(a);
    }
}
